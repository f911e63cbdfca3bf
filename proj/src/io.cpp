#include "ontd/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "ontd/errors.hpp"

namespace ontd {

namespace fs = std::filesystem;

TensorFormat parse_format(const std::string& name) {
    if (name == "text") return TensorFormat::text;
    if (name == "binary") return TensorFormat::binary;
    throw IoError("unknown tensor format '" + name + "' (expected text or binary)");
}

std::string format_extension(TensorFormat f) {
    return f == TensorFormat::text ? ".dtt" : ".dttb";
}

std::string format_double(double v) {
    std::array<char, 40> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

namespace {

double parse_double(std::string_view token, const fs::path& path) {
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
        throw IoError(path.string() + ": cannot parse real value '" + std::string(token) + "'");
    if (!std::isfinite(v))
        throw IoError(path.string() + ": non-finite value '" + std::string(token) + "'");
    return v;
}

std::uint64_t parse_uint(std::string_view token, const fs::path& path) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
        throw IoError(path.string() + ": cannot parse integer '" + std::string(token) + "'");
    return v;
}

void put_u32_le(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff),
                           static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes, 4);
}

std::uint32_t get_u32_le(std::istream& in, const fs::path& path) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4))
        throw IoError(path.string() + ": truncated binary header");
    return std::uint32_t(bytes[0]) | (std::uint32_t(bytes[1]) << 8) |
           (std::uint32_t(bytes[2]) << 16) | (std::uint32_t(bytes[3]) << 24);
}

void put_f64_le(std::ostream& out, double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    out.write(bytes, 8);
}

double get_f64_le(std::istream& in, const fs::path& path) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8))
        throw IoError(path.string() + ": truncated binary payload");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(bytes[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

DenseTensor read_tensor_text(std::istream& in, const fs::path& path) {
    std::string token;
    if (!(in >> token) || token != "DTT") throw IoError(path.string() + ": bad magic");
    if (!(in >> token)) throw IoError(path.string() + ": missing order");
    const std::uint64_t d = parse_uint(token, path);
    if (d == 0 || d > 64) throw IoError(path.string() + ": order out of range");

    std::vector<std::size_t> dims(d);
    std::size_t count = 1;
    for (std::uint64_t n = 0; n < d; ++n) {
        if (!(in >> token)) throw IoError(path.string() + ": missing dimension");
        const std::uint64_t v = parse_uint(token, path);
        if (v == 0) throw IoError(path.string() + ": zero dimension");
        if (v > (1u << 24) || count > (std::size_t(1) << 30) / v)
            throw IoError(path.string() + ": dimensions too large");
        dims[n] = static_cast<std::size_t>(v);
        count *= dims[n];
    }

    std::vector<double> values;
    values.reserve(count);
    while (in >> token) values.push_back(parse_double(token, path));
    if (values.size() != count)
        throw IoError(path.string() + ": expected " + std::to_string(count) + " values, found " +
                      std::to_string(values.size()));
    return DenseTensor(std::move(dims), std::move(values));
}

DenseTensor read_tensor_binary(std::istream& in, const fs::path& path) {
    const std::uint32_t d = get_u32_le(in, path);
    if (d == 0 || d > 64) throw IoError(path.string() + ": order out of range");
    std::vector<std::size_t> dims(d);
    std::size_t count = 1;
    for (std::uint32_t n = 0; n < d; ++n) {
        const std::uint32_t v = get_u32_le(in, path);
        if (v == 0) throw IoError(path.string() + ": zero dimension");
        if (v > (1u << 24) || count > (std::size_t(1) << 30) / v)
            throw IoError(path.string() + ": dimensions too large");
        dims[n] = v;
        count *= dims[n];
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        values[i] = get_f64_le(in, path);
        if (!std::isfinite(values[i]))
            throw IoError(path.string() + ": non-finite value at index " + std::to_string(i));
    }
    char extra;
    if (in.read(&extra, 1)) throw IoError(path.string() + ": trailing bytes after payload");
    return DenseTensor(std::move(dims), std::move(values));
}

}  // namespace

DenseTensor read_tensor(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string() + ": cannot open file");
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    if (in.gcount() == 4 && magic[0] == 'D' && magic[1] == 'T' && magic[2] == 'T' &&
        magic[3] == 'B')
        return read_tensor_binary(in, path);
    in.clear();
    in.seekg(0);
    return read_tensor_text(in, path);
}

void write_tensor(const DenseTensor& t, const fs::path& path, TensorFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string() + ": cannot open file for writing");
    if (format == TensorFormat::text) {
        out << "DTT\n" << t.order() << "\n";
        for (std::size_t n = 0; n < t.order(); ++n) out << (n ? " " : "") << t.dim(n);
        out << "\n";
        for (std::size_t i = 0; i < t.size(); ++i) out << format_double(t[i]) << "\n";
    } else {
        out.write("DTTB", 4);
        put_u32_le(out, static_cast<std::uint32_t>(t.order()));
        for (std::size_t n = 0; n < t.order(); ++n)
            put_u32_le(out, static_cast<std::uint32_t>(t.dim(n)));
        for (std::size_t i = 0; i < t.size(); ++i) put_f64_le(out, t[i]);
    }
    if (!out) throw IoError(path.string() + ": write failed");
}

DenseMatrix read_matrix_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string() + ": cannot open file");
    std::vector<double> values;
    std::size_t rows = 0, cols = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        std::size_t row_cols = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string_view tok(line.data() + start,
                                       (comma == std::string::npos ? line.size() : comma) - start);
            values.push_back(parse_double(tok, path));
            ++row_cols;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (rows == 0)
            cols = row_cols;
        else if (row_cols != cols)
            throw IoError(path.string() + ": ragged row " + std::to_string(rows + 1) + " (" +
                          std::to_string(row_cols) + " values, expected " + std::to_string(cols) +
                          ")");
        ++rows;
    }
    if (rows == 0) throw IoError(path.string() + ": empty matrix file");
    return DenseMatrix(rows, cols, std::move(values));
}

void write_matrix_csv(const DenseMatrix& m, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path.string() + ": cannot open file for writing");
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c)
            out << (c ? "," : "") << format_double(m(r, c));
        out << "\n";
    }
    if (!out) throw IoError(path.string() + ": write failed");
}

namespace {

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::vector<std::size_t> parse_size_list(const std::string& s, const fs::path& path) {
    std::vector<std::size_t> out;
    if (s.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        const std::string_view tok(s.data() + start,
                                   (comma == std::string::npos ? s.size() : comma) - start);
        out.push_back(static_cast<std::size_t>(parse_uint(tok, path)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

void write_model(const OntdModel& model, const fs::path& dir, TensorFormat format) {
    fs::create_directories(dir);
    write_tensor(model.core, dir / ("core" + format_extension(format)), format);
    std::vector<std::size_t> identity_modes;
    for (std::size_t n = 0; n < model.order(); ++n) {
        if (model.factors[n])
            write_matrix_csv(model.factors[n]->matrix(),
                             dir / ("factor_" + std::to_string(n + 1) + ".csv"));
        else
            identity_modes.push_back(n + 1);
    }
    std::ofstream manifest(dir / "model.txt");
    if (!manifest) throw IoError((dir / "model.txt").string() + ": cannot open for writing");
    manifest << "dims=" << join_sizes(model.output_dims()) << "\n";
    manifest << "ranks=" << join_sizes(model.ranks()) << "\n";
    manifest << "identity_modes=" << join_sizes(identity_modes) << "\n";
    manifest << "core_format=" << (format == TensorFormat::text ? "text" : "binary") << "\n";
}

OntdModel read_model(const fs::path& dir) {
    const fs::path manifest_path = dir / "model.txt";
    std::ifstream manifest(manifest_path);
    if (!manifest) throw IoError(manifest_path.string() + ": cannot open model manifest");

    std::vector<std::size_t> dims, ranks, identity_modes;
    std::string format_name = "text";
    std::string line;
    while (std::getline(manifest, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "dims")
            dims = parse_size_list(value, manifest_path);
        else if (key == "ranks")
            ranks = parse_size_list(value, manifest_path);
        else if (key == "identity_modes")
            identity_modes = parse_size_list(value, manifest_path);
        else if (key == "core_format")
            format_name = value;
    }
    if (dims.empty() || dims.size() != ranks.size())
        throw IoError(manifest_path.string() + ": manifest is missing dims/ranks");

    DenseTensor core =
        read_tensor(dir / ("core" + format_extension(parse_format(format_name))));
    if (core.dims() != ranks)
        throw IoError(manifest_path.string() + ": core dims disagree with the manifest ranks");

    std::vector<bool> is_identity(dims.size(), false);
    for (std::size_t m : identity_modes) {
        if (m == 0 || m > dims.size())
            throw IoError(manifest_path.string() + ": identity mode out of range");
        is_identity[m - 1] = true;
    }

    std::vector<std::optional<FactorMatrix>> factors;
    for (std::size_t n = 0; n < dims.size(); ++n) {
        if (is_identity[n]) {
            if (dims[n] != ranks[n])
                throw IoError(manifest_path.string() + ": identity mode with J_n != I_n");
            factors.emplace_back(std::nullopt);
            continue;
        }
        const fs::path fpath = dir / ("factor_" + std::to_string(n + 1) + ".csv");
        DenseMatrix m = read_matrix_csv(fpath);
        if (m.rows() != dims[n] || m.cols() != ranks[n])
            throw IoError(fpath.string() + ": factor shape disagrees with the manifest");
        try {
            factors.emplace_back(FactorMatrix::from_matrix(std::move(m)));
        } catch (const std::invalid_argument& e) {
            throw IoError(fpath.string() + ": " + e.what());
        }
    }
    return OntdModel{std::move(core), std::move(factors)};
}

void write_report(const DecomposeReport& report, const std::vector<ReportEntry>& config,
                  const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream out(dir / "report.txt");
    if (!out) throw IoError((dir / "report.txt").string() + ": cannot open for writing");

    {
        const auto now = std::chrono::system_clock::now();
        const std::time_t tt = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::tm tm_utc{};
        gmtime_r(&tt, &tm_utc);
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        out << "timestamp=" << buf << "\n";
    }
    for (const ReportEntry& e : config) out << e.key << "=" << e.value << "\n";

    out << "relative_error=" << format_double(report.relative_error) << "\n";
    out << "compression_ratio=" << format_double(report.compression_ratio) << "\n";
    out << "space_savings=" << format_double(report.space_savings) << "\n";
    out << "clamped_negatives=" << report.clamped_negatives << "\n";
    out << "max_orthonormality_defect=" << format_double(report.max_orthonormality_defect)
        << "\n";
    for (std::size_t n = 0; n < report.mode_diagnostics.size(); ++n) {
        const std::string prefix = "mode_" + std::to_string(n + 1) + "_";
        if (!report.mode_diagnostics[n]) {
            out << prefix << "factor=identity\n";
            continue;
        }
        const ModeDiagnostics& d = *report.mode_diagnostics[n];
        out << prefix << "iterations=" << d.iterations << "\n";
        out << prefix << "converged=" << (d.converged ? "yes" : "no") << "\n";
        out << prefix << "asymmetry=" << format_double(d.asymmetry) << "\n";
        if (!d.residual_history.empty()) {
            const auto& last = d.residual_history.back();
            out << prefix << "final_residuals=" << format_double(last[0]) << ","
                << format_double(last[1]) << "," << format_double(last[2]) << "\n";
            out << prefix << "residual_csv=residuals_mode_" << n + 1 << ".csv\n";
        }
    }
    out << "warnings=" << report.warnings.size() << "\n";
    for (std::size_t i = 0; i < report.warnings.size(); ++i)
        out << "warning_" << i + 1 << "=" << report.warnings[i] << "\n";

    for (std::size_t n = 0; n < report.mode_diagnostics.size(); ++n) {
        if (!report.mode_diagnostics[n]) continue;
        const ModeDiagnostics& d = *report.mode_diagnostics[n];
        std::ofstream csv(dir / ("residuals_mode_" + std::to_string(n + 1) + ".csv"));
        csv << "iter,res_x,res_z,res_m,objective\n";
        for (std::size_t i = 0; i < d.residual_history.size(); ++i) {
            csv << i + 1 << "," << format_double(d.residual_history[i][0]) << ","
                << format_double(d.residual_history[i][1]) << ","
                << format_double(d.residual_history[i][2]) << ","
                << format_double(d.objective_history[i]) << "\n";
        }
    }
}

}  // namespace ontd
