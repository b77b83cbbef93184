#include "emubench_app/bundle.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <system_error>
#include <vector>

#include "emubench/error.hpp"
#include "emubench_app/spec_json.hpp"

namespace emubench::app {

namespace fs = std::filesystem;
using nlohmann::json;

ExportFormat parse_export_format(std::string_view name) {
    if (name == "raw64") return ExportFormat::raw64;
    if (name == "csv") return ExportFormat::csv;
    throw ConfigError("unknown export format: " + std::string(name));
}

std::string_view export_format_name(ExportFormat format) { return format == ExportFormat::csv ? "csv" : "raw64"; }

void Fnv1a64::update(std::span<const unsigned char> bytes) noexcept {
    for (const unsigned char b : bytes) {
        state_ ^= b;
        state_ *= 0x100000001b3ULL;
    }
}

void Fnv1a64::update(std::string_view text) noexcept {
    update(std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::string Fnv1a64::hex() const {
    std::array<char, 16> buf{};
    std::uint64_t v = state_;
    for (int i = 15; i >= 0; --i) {
        buf[static_cast<std::size_t>(i)] = "0123456789abcdef"[v & 0xf];
        v >>= 4;
    }
    return std::string(buf.data(), buf.size());
}

namespace {

void to_little_endian(std::span<const double> values, std::vector<unsigned char>& out) {
    out.resize(values.size() * sizeof(double));
    std::memcpy(out.data(), values.data(), out.size());
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < out.size(); i += sizeof(double)) {
            std::reverse(out.begin() + static_cast<std::ptrdiff_t>(i),
                         out.begin() + static_cast<std::ptrdiff_t>(i + sizeof(double)));
        }
    }
}

void from_little_endian(std::span<const unsigned char> bytes, std::span<double> out) {
    std::vector<unsigned char> tmp(bytes.begin(), bytes.end());
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < tmp.size(); i += sizeof(double)) {
            std::reverse(tmp.begin() + static_cast<std::ptrdiff_t>(i),
                         tmp.begin() + static_cast<std::ptrdiff_t>(i + sizeof(double)));
        }
    }
    std::memcpy(out.data(), tmp.data(), tmp.size());
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::vector<std::size_t> bundle_shape(const ScenarioSpec& spec, Split split) {
    const bool train = split == Split::train;
    std::vector<std::size_t> shape{
        static_cast<std::size_t>(train ? spec.recipe.train_samples : spec.recipe.test_samples),
        static_cast<std::size_t>((train ? spec.recipe.train_steps : spec.recipe.test_steps) + 1),
        static_cast<std::size_t>(spec.channels())};
    for (int d = 0; d < spec.num_dims; ++d) shape.push_back(static_cast<std::size_t>(spec.num_points));
    return shape;
}

void write_sidecar(const BundlePaths& paths, const ScenarioSpec& spec, Split split, std::uint64_t seed,
                   const std::vector<std::size_t>& shape, ExportFormat format, std::uintmax_t bytes,
                   const Fnv1a64& hash) {
    const json sidecar{
        {"format_version", kFormatVersion},
        {"name", spec.canonical_name()},
        {"split", std::string(split_name(split))},
        {"seed", seed},
        {"shape", shape},
        {"dtype", "float64"},
        {"byte_order", "little"},
        {"layout", "C"},
        {"format", std::string(export_format_name(format))},
        {"payload", paths.payload.filename().string()},
        {"bytes", bytes},
        {"checksum", "fnv1a64:" + hash.hex()},
        {"spec", spec_to_json(spec)},
    };
    std::ofstream side(paths.sidecar, std::ios::trunc);
    if (!side) throw ConfigError("cannot write " + paths.sidecar.string());
    side << sidecar.dump(2) << "\n";
}

}  // namespace

BundlePaths write_bundle(const fs::path& dir, const ScenarioSpec& spec, Split split, std::uint64_t seed,
                         ExportFormat format, unsigned threads) {
    if (format == ExportFormat::csv && spec.num_dims != 1) throw ConfigError("csv export is limited to 1D scenarios");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());

    const std::string stem = spec.canonical_name() + "." + std::string(split_name(split));
    BundlePaths paths{dir / (stem + "." + std::string(export_format_name(format))), dir / (stem + ".json")};
    std::ofstream out(paths.payload, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + paths.payload.string());

    Fnv1a64 hash;
    std::uintmax_t bytes = 0;
    std::vector<unsigned char> buffer;
    if (format == ExportFormat::csv) {
        std::string header = "sample,t,channel";
        for (int i = 0; i < spec.num_points; ++i) header += ",x" + std::to_string(i);
        header += "\n";
        out << header;
        hash.update(header);
        bytes += header.size();
    }
    try {
        generate_dataset_streaming(spec, split, seed, threads, [&](int sample, const Trajectory& traj) {
            if (format == ExportFormat::raw64) {
                to_little_endian(traj.data(), buffer);
                out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
                hash.update(buffer);
                bytes += buffer.size();
                return;
            }
            const std::size_t n = traj.grid().spatial_size();
            for (int t = 0; t < traj.num_snapshots(); ++t) {
                const auto snap = traj.snapshot_data(t);
                for (int c = 0; c < traj.channels(); ++c) {
                    std::string row = std::to_string(sample) + "," + std::to_string(t) + "," + std::to_string(c);
                    for (std::size_t i = 0; i < n; ++i) row += "," + format_double(snap[static_cast<std::size_t>(c) * n + i]);
                    row += "\n";
                    out << row;
                    hash.update(row);
                    bytes += row.size();
                }
            }
        });
    } catch (...) {
        out.close();
        fs::remove(paths.payload, ec);
        throw;
    }
    out.close();
    if (!out) throw Error("failed writing " + paths.payload.string());

    write_sidecar(paths, spec, split, seed, bundle_shape(spec, split), format, bytes, hash);
    return paths;
}

BundlePaths save_trajectory_set(const fs::path& dir, const std::string& stem, const ScenarioSpec& spec,
                                const TrajectorySet& set) {
    if (set.grid != spec.grid() || set.channels != spec.channels()) {
        throw ShapeError("save: trajectory set does not match the spec");
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    BundlePaths paths{dir / (stem + ".raw64"), dir / (stem + ".json")};
    std::vector<unsigned char> buffer;
    to_little_endian(set.data, buffer);
    std::ofstream out(paths.payload, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
    out.close();
    if (!out) throw ConfigError("cannot write " + paths.payload.string());
    Fnv1a64 hash;
    hash.update(buffer);
    write_sidecar(paths, spec, set.split, set.seed, set.shape(), ExportFormat::raw64, buffer.size(), hash);
    return paths;
}

json read_sidecar(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("malformed sidecar " + path.string() + ": " + e.what());
    }
}

LoadedBundle read_bundle(const fs::path& path) {
    fs::path sidecar_path = path;
    if (path.extension() != ".json") sidecar_path.replace_extension(".json");
    LoadedBundle bundle;
    bundle.sidecar = read_sidecar(sidecar_path);
    const json& s = bundle.sidecar;
    if (s.value("format_version", 0) != kFormatVersion) throw ConfigError("unsupported bundle format version");
    if (s.value("format", "") != "raw64") throw ConfigError("only raw64 bundles can be read back");
    bundle.spec = spec_from_json(s.at("spec"));

    const auto shape = s.at("shape").get<std::vector<std::size_t>>();
    if (shape.size() != static_cast<std::size_t>(3 + bundle.spec.num_dims)) throw ShapeError("sidecar shape rank mismatch");
    std::size_t count = 1;
    for (const auto d : shape) count *= d;

    const fs::path payload = sidecar_path.parent_path() / s.at("payload").get<std::string>();
    std::ifstream in(payload, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + payload.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != count * sizeof(double) || bytes.size() != s.at("bytes").get<std::uintmax_t>()) {
        throw ShapeError("payload size does not match the sidecar shape");
    }
    Fnv1a64 hash;
    hash.update(bytes);
    if ("fnv1a64:" + hash.hex() != s.at("checksum").get<std::string>()) throw NumericError("payload checksum mismatch");

    auto& d = bundle.data;
    d.name = s.at("name").get<std::string>();
    d.split = s.at("split").get<std::string>() == "test" ? Split::test : Split::train;
    d.seed = s.at("seed").get<std::uint64_t>();
    d.grid = bundle.spec.grid();
    d.samples = static_cast<int>(shape[0]);
    d.snapshots = static_cast<int>(shape[1]);
    d.channels = static_cast<int>(shape[2]);
    if (d.channels != bundle.spec.channels() ||
        std::any_of(shape.begin() + 3, shape.end(), [&](std::size_t n) { return n != static_cast<std::size_t>(bundle.spec.num_points); })) {
        throw ShapeError("sidecar shape disagrees with its spec");
    }
    d.data.resize(count);
    from_little_endian(bytes, d.data);
    return bundle;
}

}  // namespace emubench::app
