#include "phasesync/instance_io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace phasesync {

namespace {

constexpr const char* kMagic = "phasesync-instance";
constexpr int kVersion = 1;

void put_hex(std::ostream& os, double x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(x)));
    os << buf;
}

void put_row(std::ostream& os, const auto& row) {
    for (Eigen::Index k = 0; k < row.size(); ++k) {
        if (k) os << ' ';
        put_hex(os, row[k].real());
        os << ' ';
        put_hex(os, row[k].imag());
    }
    os << '\n';
}

double get_hex(std::istream& is) {
    std::string tok;
    if (!(is >> tok)) throw InputError("instance: unexpected end of data");
    std::uint64_t bits = 0;
    const char* end = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(tok.data(), end, bits, 16);
    if (tok.size() != 16 || ec != std::errc() || p != end) throw InputError("instance: bad hex token '" + tok + "'");
    return std::bit_cast<double>(bits);
}

std::string expect_key(std::istream& is, const std::string& key) {
    std::string k, v;
    if (!(is >> k) || k != key) throw InputError("instance: expected '" + key + "'");
    if (!(is >> v)) throw InputError("instance: missing value for '" + key + "'");
    return v;
}

template <class T>
T to_number(const std::string& s, const std::string& what) {
    T v{};
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) throw InputError("instance: bad " + what + " '" + s + "'");
    return v;
}

}  // namespace

std::string format_instance(const Observation& obs, std::uint64_t seed) {
    std::ostringstream os;
    char sigma[64];
    auto [p, ec] = std::to_chars(sigma, sigma + sizeof sigma, obs.sigma);
    os << kMagic << ' ' << kVersion << '\n'
       << "n " << obs.n() << '\n'
       << "sigma " << std::string(sigma, p) << '\n'
       << "seed " << seed << '\n'
       << "truth " << (obs.truth ? 1 : 0) << '\n'
       << "Y\n";
    for (Eigen::Index j = 0; j < obs.n(); ++j) put_row(os, obs.y.row(j));
    if (obs.truth) {
        os << "z\n";
        put_row(os, obs.truth->values());
    }
    return os.str();
}

InstanceFile parse_instance(const std::string& text) {
    std::istringstream is(text);
    std::string magic;
    int version = 0;
    if (!(is >> magic >> version) || magic != kMagic) throw InputError("instance: not a phasesync instance file");
    if (version != kVersion) throw InputError("instance: unsupported version " + std::to_string(version));
    const auto n = to_number<long long>(expect_key(is, "n"), "n");
    if (n < 1) throw InputError("instance: n must be >= 1");
    const double sigma = to_number<double>(expect_key(is, "sigma"), "sigma");
    const auto seed = to_number<std::uint64_t>(expect_key(is, "seed"), "seed");
    const auto has_truth = expect_key(is, "truth");
    if (has_truth != "0" && has_truth != "1") throw InputError("instance: truth flag must be 0 or 1");
    std::string marker;
    if (!(is >> marker) || marker != "Y") throw InputError("instance: expected 'Y'");

    CMatrix y(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            const double re = get_hex(is);
            y(j, k) = Complex(re, get_hex(is));
        }
    std::optional<PhaseVector> truth;
    if (has_truth == "1") {
        if (!(is >> marker) || marker != "z") throw InputError("instance: expected 'z'");
        CVector z(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double re = get_hex(is);
            z[j] = Complex(re, get_hex(is));
        }
        truth = PhaseVector(z);
    }
    std::string extra;
    if (is >> extra) throw InputError("instance: trailing data");
    return {observation_from_matrix(std::move(y), sigma, std::move(truth)), seed};
}

void write_instance(const std::string& path, const Observation& obs, std::uint64_t seed) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << format_instance(obs, seed);
    if (!f) throw std::runtime_error("write failed: " + path);
}

InstanceFile read_instance(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("instance not found: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_instance(ss.str());
}

}  // namespace phasesync
