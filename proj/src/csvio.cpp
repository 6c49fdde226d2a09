#include "qchaos/csvio.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "binary snapshot writer assumes a little-endian host");

namespace qchaos::csvio {
namespace {

using nlohmann::json;

// Shortest representation that round-trips the double exactly; NaN -> empty.
std::string fmt_double(double v) {
    if (std::isnan(v)) return {};
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_cell(const std::string& s, const std::string& path, std::size_t line_no) {
    if (s.empty()) return NAN;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad numeric cell '" + s + "'");
    return v;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream f(path, mode);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return f;
}

// Strips a trailing '\r' so files survive CRLF round-trips.
bool get_row(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

const char* kind_name(DistributionKind k) {
    switch (k) {
        case DistributionKind::wigner: return "wigner";
        case DistributionKind::husimi: return "husimi";
        case DistributionKind::histogram: return "histogram";
    }
    throw std::logic_error("unknown DistributionKind");
}

DistributionKind kind_from(const std::string& s) {
    if (s == "wigner") return DistributionKind::wigner;
    if (s == "husimi") return DistributionKind::husimi;
    if (s == "histogram") return DistributionKind::histogram;
    throw std::runtime_error("unknown distribution kind '" + s + "'");
}

const char* source_name(DistributionSource s) {
    return s == DistributionSource::single_trajectory ? "single_trajectory" : "ensemble_average";
}

DistributionSource source_from(const std::string& s) {
    if (s == "single_trajectory") return DistributionSource::single_trajectory;
    if (s == "ensemble_average") return DistributionSource::ensemble_average;
    throw std::runtime_error("unknown distribution source '" + s + "'");
}

}  // namespace

void write_observables_csv(const std::string& path, const std::vector<ObservablesRow>& rows) {
    auto f = open_out(path);
    f << kObservablesHeader << '\n';
    for (const auto& r : rows) {
        f << fmt_double(r.t) << ',' << fmt_double(r.mean_x) << ',' << fmt_double(r.mean_p) << ','
          << fmt_double(r.var_x) << ',' << fmt_double(r.var_p) << ',' << fmt_double(r.Delta_xp)
          << ',' << fmt_double(r.delta_xp) << ',' << fmt_double(r.mean_n) << ','
          << fmt_double(r.Delta_n) << ',' << fmt_double(r.sigma_z) << ',' << fmt_double(r.E_N)
          << ',' << fmt_double(r.purity) << ',' << fmt_double(r.N_minus) << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<ObservablesRow> read_observables_csv(const std::string& path) {
    auto f = open_in(path);
    std::string line;
    if (!get_row(f, line) || line != kObservablesHeader)
        throw std::runtime_error(path + ":1: expected header '" + kObservablesHeader + "'");
    std::vector<ObservablesRow> rows;
    std::size_t line_no = 1;
    while (get_row(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_row(line);
        if (cells.size() != 13)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 13 columns, got " +
                                     std::to_string(cells.size()));
        ObservablesRow r;
        double* fields[13] = {&r.t,      &r.mean_x,  &r.mean_p, &r.var_x,   &r.var_p,
                              &r.Delta_xp, &r.delta_xp, &r.mean_n, &r.Delta_n, &r.sigma_z,
                              &r.E_N,    &r.purity,  &r.N_minus};
        for (int i = 0; i < 13; ++i) *fields[i] = parse_cell(cells[i], path, line_no);
        rows.push_back(r);
    }
    return rows;
}

void write_twa_snapshots_csv(const std::string& path, const std::vector<double>& times,
                             const std::vector<std::vector<SemiclassicalState>>& snapshots) {
    if (times.size() != snapshots.size())
        throw std::invalid_argument("write_twa_snapshots_csv: times/snapshots size mismatch");
    auto f = open_out(path);
    f << "t,traj,x,p,u,v,Z\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        const std::string t = fmt_double(times[i]);
        for (std::size_t j = 0; j < snapshots[i].size(); ++j) {
            const auto& s = snapshots[i][j];
            f << t << ',' << j << ',' << fmt_double(s.x) << ',' << fmt_double(s.p) << ','
              << fmt_double(s.u) << ',' << fmt_double(s.v) << ',' << fmt_double(s.Z) << '\n';
        }
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

void write_stroboscopic_csv(const std::string& path,
                            const std::vector<std::vector<SemiclassicalState>>& per_period) {
    auto f = open_out(path);
    f << "period,traj,x,p\n";
    // per_period[k] holds the snapshot at t = (k+1) * T, so periods are 1-based.
    for (std::size_t k = 0; k < per_period.size(); ++k)
        for (std::size_t j = 0; j < per_period[k].size(); ++j)
            f << (k + 1) << ',' << j << ',' << fmt_double(per_period[k][j].x) << ','
              << fmt_double(per_period[k][j].p) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
}

void write_jumps_csv(const std::string& path, const std::vector<JumpRecord>& records) {
    auto f = open_out(path);
    f << "traj,jump_time\n";
    for (const auto& rec : records)
        for (const double t : rec.times) f << rec.trajectory_id << ',' << fmt_double(t) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
}

void write_distribution(const std::string& csv_path, const PhaseSpaceDistribution& dist) {
    if (dist.values.rows() != dist.x_axis.size() || dist.values.cols() != dist.p_axis.size())
        throw std::invalid_argument("write_distribution: axis/value shape mismatch");
    auto f = open_out(csv_path);
    f << "x,p,value\n";
    for (Eigen::Index i = 0; i < dist.x_axis.size(); ++i) {
        const std::string x = fmt_double(dist.x_axis(i));
        for (Eigen::Index j = 0; j < dist.p_axis.size(); ++j)
            f << x << ',' << fmt_double(dist.p_axis(j)) << ',' << fmt_double(dist.values(i, j))
              << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + csv_path);

    json meta;
    meta["kind"] = kind_name(dist.kind);
    meta["source"] = source_name(dist.source);
    meta["t"] = dist.t;
    meta["nx"] = dist.x_axis.size();
    meta["np"] = dist.p_axis.size();
    auto mf = open_out(csv_path + ".json");
    mf << meta.dump(2) << '\n';
    if (!mf) throw std::runtime_error("write failed: " + csv_path + ".json");
}

PhaseSpaceDistribution read_distribution(const std::string& csv_path) {
    json meta;
    {
        auto mf = open_in(csv_path + ".json");
        try {
            meta = json::parse(mf);
        } catch (const json::parse_error& e) {
            throw std::runtime_error(csv_path + ".json: " + e.what());
        }
    }
    PhaseSpaceDistribution dist;
    dist.kind = kind_from(meta.at("kind").get<std::string>());
    dist.source = source_from(meta.at("source").get<std::string>());
    dist.t = meta.at("t").get<double>();
    const Eigen::Index nx = meta.at("nx").get<Eigen::Index>();
    const Eigen::Index np = meta.at("np").get<Eigen::Index>();
    if (nx <= 0 || np <= 0) throw std::runtime_error(csv_path + ".json: non-positive axis size");
    dist.x_axis.resize(nx);
    dist.p_axis.resize(np);
    dist.values.resize(nx, np);

    auto f = open_in(csv_path);
    std::string line;
    if (!get_row(f, line) || line != "x,p,value")
        throw std::runtime_error(csv_path + ":1: expected header 'x,p,value'");
    std::size_t line_no = 1;
    for (Eigen::Index i = 0; i < nx; ++i) {
        for (Eigen::Index j = 0; j < np; ++j) {
            if (!get_row(f, line))
                throw std::runtime_error(csv_path + ": truncated (expected " +
                                         std::to_string(nx * np) + " rows)");
            ++line_no;
            const auto cells = split_row(line);
            if (cells.size() != 3)
                throw std::runtime_error(csv_path + ":" + std::to_string(line_no) +
                                         ": expected 3 columns");
            const double x = parse_cell(cells[0], csv_path, line_no);
            const double p = parse_cell(cells[1], csv_path, line_no);
            dist.values(i, j) = parse_cell(cells[2], csv_path, line_no);
            if (j == 0) dist.x_axis(i) = x;
            if (i == 0) dist.p_axis(j) = p;
            if (x != dist.x_axis(i) || p != dist.p_axis(j))
                throw std::runtime_error(csv_path + ":" + std::to_string(line_no) +
                                         ": rows out of (x,p) lattice order");
        }
    }
    return dist;
}

namespace {

constexpr char kSnapshotMagic[8] = {'Q', 'S', 'N', 'A', 'P', '1', '\n', '\0'};

void write_complex_array(std::ostream& f, const Eigen::ArrayXcd& a) {
    // std::complex<double> is layout-compatible with double[2] (re, im).
    f.write(reinterpret_cast<const char*>(a.data()),
            static_cast<std::streamsize>(sizeof(double) * 2 * a.size()));
}

void read_complex_array(std::istream& f, Eigen::ArrayXcd& a) {
    f.read(reinterpret_cast<char*>(a.data()),
           static_cast<std::streamsize>(sizeof(double) * 2 * a.size()));
}

}  // namespace

void write_spinor_snapshot(const std::string& path, const SpinorState& state) {
    if (state.up.size() != state.grid.n_points || state.down.size() != state.grid.n_points)
        throw std::invalid_argument("write_spinor_snapshot: component size != grid size");
    json header;
    header["format"] = "spinor-grid-1";
    header["encoding"] = "interleaved-f64-le";
    header["arrays"] = {"up", "down"};
    header["n_points"] = state.grid.n_points;
    header["x_min"] = state.grid.x_min;
    header["x_max"] = state.grid.x_max;
    header["t"] = state.t;
    const std::string htext = header.dump();

    auto f = open_out(path, std::ios::binary);
    f.write(kSnapshotMagic, sizeof kSnapshotMagic);
    const std::uint64_t hlen = htext.size();
    f.write(reinterpret_cast<const char*>(&hlen), sizeof hlen);
    f.write(htext.data(), static_cast<std::streamsize>(htext.size()));
    write_complex_array(f, state.up);
    write_complex_array(f, state.down);
    if (!f) throw std::runtime_error("write failed: " + path);
}

SpinorState read_spinor_snapshot(const std::string& path) {
    auto f = open_in(path, std::ios::binary);
    char magic[sizeof kSnapshotMagic];
    f.read(magic, sizeof magic);
    if (!f || std::memcmp(magic, kSnapshotMagic, sizeof magic) != 0)
        throw std::runtime_error(path + ": not a spinor snapshot file");
    std::uint64_t hlen = 0;
    f.read(reinterpret_cast<char*>(&hlen), sizeof hlen);
    if (!f || hlen > (1u << 20)) throw std::runtime_error(path + ": corrupt header length");
    std::string htext(hlen, '\0');
    f.read(htext.data(), static_cast<std::streamsize>(hlen));
    json header;
    try {
        header = json::parse(htext);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": corrupt header: " + e.what());
    }
    if (header.at("format").get<std::string>() != "spinor-grid-1")
        throw std::runtime_error(path + ": unsupported snapshot format");

    SpinorState state;
    state.grid = QuadratureGrid(header.at("n_points").get<int>(), header.at("x_min").get<double>(),
                                header.at("x_max").get<double>());
    state.t = header.at("t").get<double>();
    state.up.resize(state.grid.n_points);
    state.down.resize(state.grid.n_points);
    read_complex_array(f, state.up);
    read_complex_array(f, state.down);
    if (!f) throw std::runtime_error(path + ": truncated data section");
    return state;
}

}  // namespace qchaos::csvio
