#include "refgov/disturbance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace refgov {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint32_t checked_u32(std::size_t value, const char* what) {
    if (value > std::numeric_limits<std::uint32_t>::max())
        throw std::out_of_range(std::string(what) + " index exceeds 32 bits");
    return static_cast<std::uint32_t>(value);
}

constexpr char kDumpMagic[4] = {'R', 'G', 'S', 'C'};

void write_u32(std::ostream& out, std::uint32_t value) {
    const char bytes[4] = {static_cast<char>(value & 0xFF), static_cast<char>((value >> 8) & 0xFF),
                           static_cast<char>((value >> 16) & 0xFF), static_cast<char>((value >> 24) & 0xFF)};
    out.write(bytes, 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
}

DisturbanceModel::DisturbanceModel(std::vector<Range> ranges, DistributionKind kind)
    : ranges_(std::move(ranges)), kind_(kind) {
    if (ranges_.empty()) throw std::invalid_argument("disturbance model needs at least one state range");
    for (std::size_t i = 0; i < ranges_.size(); ++i) {
        const auto [lo, hi] = ranges_[i];
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
            throw std::invalid_argument("disturbance range " + std::to_string(i) + " must satisfy lo <= hi");
    }
}

DisturbanceModel DisturbanceModel::zero(std::size_t state_dim) {
    return DisturbanceModel(std::vector<Range>(state_dim, Range{0.0, 0.0}));
}

ScenarioSet::ScenarioSet(std::size_t n_sim, std::size_t horizon, std::size_t state_dim, std::uint64_t seed,
                         std::vector<double> values)
    : n_sim_(n_sim), horizon_(horizon), state_dim_(state_dim), seed_(seed), values_(std::move(values)) {
    if (n_sim_ == 0 || horizon_ == 0 || state_dim_ == 0)
        throw std::invalid_argument("scenario set dimensions must be positive");
    if (values_.size() != n_sim_ * horizon_ * state_dim_)
        throw std::invalid_argument("scenario value count does not match n_sim * horizon * state_dim");
}

double scenario_entry(const DisturbanceModel& model, std::uint64_t seed, std::size_t k, std::size_t j,
                      std::size_t i) {
    const Range range = model.ranges()[i];
    const Philox4x32::Counter counter{checked_u32(k, "scenario"), checked_u32(j, "step"),
                                      checked_u32(i, "state"), 0u};
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const auto words = Philox4x32::generate(counter, key);
    const std::uint64_t bits = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    // 53 random mantissa bits -> u in [0, 1).
    const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
    // hi - lo may round up, so clamp to keep entries inside the declared range.
    return std::min(range.lo + (range.hi - range.lo) * u, range.hi);
}

ScenarioSet sample_scenarios(const DisturbanceModel& model, std::size_t n_sim, std::size_t horizon,
                             std::uint64_t seed) {
    if (n_sim == 0 || horizon == 0) throw std::invalid_argument("n_sim and horizon must be at least 1");
    if (model.kind() != DistributionKind::uniform)
        throw std::invalid_argument("only uniform disturbances are supported");
    const std::size_t n = model.state_dim();
    std::vector<double> values(n_sim * horizon * n);
    std::size_t index = 0;
    for (std::size_t k = 0; k < n_sim; ++k)
        for (std::size_t j = 0; j < horizon; ++j)
            for (std::size_t i = 0; i < n; ++i) values[index++] = scenario_entry(model, seed, k, j, i);
    return ScenarioSet(n_sim, horizon, n, seed, std::move(values));
}

ScenarioSet zero_scenarios(std::size_t state_dim, std::size_t horizon) {
    return ScenarioSet(1, horizon, state_dim, 0, std::vector<double>(horizon * state_dim, 0.0));
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, SeedStream stream) noexcept {
    const std::uint64_t stream_key = splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(stream) + 1));
    return splitmix64(stream_key + splitmix64(index));
}

void write_scenario_dump(const ScenarioSet& scenarios, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open scenario dump for writing: " + path.string());
    out.write(kDumpMagic, 4);
    write_u32(out, checked_u32(scenarios.n_sim(), "n_sim"));
    write_u32(out, checked_u32(scenarios.horizon(), "horizon"));
    write_u32(out, checked_u32(scenarios.state_dim(), "state_dim"));
    for (double value : scenarios.values())
        write_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(value)));
    if (!out) throw std::runtime_error("failed writing scenario dump: " + path.string());
}

ScenarioSet read_scenario_dump(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scenario dump: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string_view(magic, 4) != std::string_view(kDumpMagic, 4))
        throw std::runtime_error("not a scenario dump (bad magic): " + path.string());
    const std::size_t n_sim = read_u32(in);
    const std::size_t horizon = read_u32(in);
    const std::size_t n = read_u32(in);
    if (!in) throw std::runtime_error("truncated scenario dump header: " + path.string());
    std::vector<double> values(n_sim * horizon * n);
    for (double& value : values) value = static_cast<double>(std::bit_cast<float>(read_u32(in)));
    if (!in) throw std::runtime_error("truncated scenario dump: " + path.string());
    return ScenarioSet(n_sim, horizon, n, 0, std::move(values));
}

}  // namespace refgov
