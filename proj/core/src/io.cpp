#include "mcporo/io.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "mcporo/error.hpp"

namespace mcporo {

namespace {

constexpr char kMagic[8] = {'M', 'C', 'P', 'D', 'U', 'M', 'P', '1'};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_doubles(std::ostream& out, const double* data, std::size_t n) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw Error(ErrorKind::Io, "cannot open " + path.string());
  }

  template <class T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    check();
    return v;
  }

  void get_doubles(double* data, std::size_t n) {
    in_.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
    check();
  }

  std::int64_t get_count(std::int64_t limit) {
    const auto n = get<std::int64_t>();
    if (n < 0 || n > limit) throw Error(ErrorKind::Io, path_.string() + ": corrupt count");
    return n;
  }

  DumpKind header() {
    char magic[8];
    in_.read(magic, 8);
    check();
    if (std::memcmp(magic, kMagic, 8) != 0) throw Error(ErrorKind::Io, path_.string() + " is not a dump file");
    const char kind = get<char>();
    if (kind != 'F' && kind != 'M') throw Error(ErrorKind::Io, path_.string() + ": unknown dump kind");
    return static_cast<DumpKind>(kind);
  }

 private:
  void check() {
    if (!in_) throw Error(ErrorKind::Io, path_.string() + ": truncated dump");
  }

  std::ifstream in_;
  std::filesystem::path path_;
};

constexpr std::int64_t kMaxCount = std::int64_t{1} << 34;

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string grid_label(int n) { return std::to_string(n) + "x" + std::to_string(n); }

}  // namespace

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

void write_fine_vtk(const std::filesystem::path& path, const FineMesh& mesh, const ContinuumMap& cont,
                    const FineState& state) {
  auto out = open_output(path);
  out.precision(12);
  const int n = mesh.node_count();
  const int ne = mesh.element_count();
  out << "# vtk DataFile Version 3.0\nfine state t=" << state.t << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n << " double\n";
  for (const auto& p : mesh.nodes()) out << p.x << ' ' << p.y << " 0\n";
  out << "CELLS " << ne << ' ' << 4 * ne << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << ne << '\n';
  for (int e = 0; e < ne; ++e) out << "5\n";
  out << "CELL_DATA " << ne << "\nSCALARS continuum int 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < ne; ++e) out << cont[e] + 1 << '\n';
  out << "POINT_DATA " << n << "\nVECTORS u double\n";
  const auto u1 = state.u1();
  const auto u2 = state.u2();
  const auto p = state.p();
  for (int i = 0; i < n; ++i) out << u1[i] << ' ' << u2[i] << " 0\n";
  out << "SCALARS p double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < n; ++i) out << p[i] << '\n';
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

void write_macro_vtk(const std::filesystem::path& path, int coarse_n, const BoundingBox& domain, int n_continua,
                     const MacroState& state) {
  const MacroLayout layout(n_continua, (coarse_n + 1) * (coarse_n + 1));
  if (state.x.size() != layout.size()) throw Error(ErrorKind::InvalidArgument, "macro state size mismatch");
  auto out = open_output(path);
  out.precision(12);
  out << "# vtk DataFile Version 3.0\nmacro state t=" << state.t << "\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << coarse_n + 1 << ' ' << coarse_n + 1 << " 1\n";
  out << "ORIGIN " << domain.x0 << ' ' << domain.y0 << " 0\n";
  out << "SPACING " << domain.width() / coarse_n << ' ' << domain.height() / coarse_n << " 1\n";
  out << "POINT_DATA " << layout.node_count() << '\n';
  auto array = [&](const std::string& name, int field) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int node = 0; node < layout.node_count(); ++node) out << state.x[layout.index(field, node)] << '\n';
  };
  for (int i = 0; i < n_continua; ++i) {
    for (int s = 0; s < 2; ++s) {
      array("U" + std::to_string(i + 1) + std::to_string(s + 1), layout.displacement_field(i, s));
    }
  }
  for (int i = 0; i < n_continua; ++i) array("P" + std::to_string(i + 1), layout.pressure_field(i));
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

void write_fine_dump(const std::filesystem::path& path, const FineMesh& mesh, const ContinuumMap& cont,
                     const FineState& state) {
  auto out = open_output(path);
  out.write(kMagic, 8);
  put(out, static_cast<char>(DumpKind::Fine));
  const auto& st = mesh.structure();
  put(out, static_cast<std::int64_t>(st ? st->nx : 0));
  put(out, static_cast<std::int64_t>(st ? st->ny : 0));
  put(out, static_cast<std::int64_t>(mesh.node_count()));
  for (const auto& p : mesh.nodes()) {
    put(out, p.x);
    put(out, p.y);
  }
  put(out, static_cast<std::int64_t>(mesh.element_count()));
  for (const auto& t : mesh.triangles()) {
    for (int v : t) put(out, static_cast<std::int32_t>(v));
  }
  put(out, static_cast<std::int64_t>(cont.n_continua()));
  for (int i : cont.indices()) put(out, static_cast<std::int32_t>(i));
  put(out, state.t);
  put(out, static_cast<std::int64_t>(state.x.size()));
  put_doubles(out, state.x.data(), static_cast<std::size_t>(state.x.size()));
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

void write_macro_dump(const std::filesystem::path& path, int coarse_n, const BoundingBox& domain, int n_continua,
                      std::string_view variant, const MacroState& state) {
  auto out = open_output(path);
  out.write(kMagic, 8);
  put(out, static_cast<char>(DumpKind::Macro));
  put(out, static_cast<std::int64_t>(coarse_n));
  put(out, domain.x0);
  put(out, domain.y0);
  put(out, domain.x1);
  put(out, domain.y1);
  put(out, static_cast<std::int64_t>(n_continua));
  put(out, static_cast<std::int64_t>(variant.size()));
  out.write(variant.data(), static_cast<std::streamsize>(variant.size()));
  put(out, state.t);
  put(out, static_cast<std::int64_t>(state.x.size()));
  put_doubles(out, state.x.data(), static_cast<std::size_t>(state.x.size()));
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

DumpKind peek_dump_kind(const std::filesystem::path& path) { return Reader(path).header(); }

FineDump read_fine_dump(const std::filesystem::path& path) {
  Reader r(path);
  if (r.header() != DumpKind::Fine) throw Error(ErrorKind::Io, path.string() + " is not a fine-state dump");
  const auto nx = r.get_count(kMaxCount);
  const auto ny = r.get_count(kMaxCount);
  const auto nn = r.get_count(kMaxCount);
  std::vector<Point> nodes(static_cast<std::size_t>(nn));
  for (auto& p : nodes) {
    p.x = r.get<double>();
    p.y = r.get<double>();
  }
  const auto ne = r.get_count(kMaxCount);
  std::vector<Triangle> tris(static_cast<std::size_t>(ne));
  for (auto& t : tris) {
    for (auto& v : t) {
      v = r.get<std::int32_t>();
      if (v < 0 || v >= nn) throw Error(ErrorKind::Io, path.string() + ": triangle references a missing node");
    }
  }
  const auto nc = r.get_count(1 << 20);
  std::vector<int> idx(static_cast<std::size_t>(ne));
  for (auto& i : idx) i = r.get<std::int32_t>();
  FineDump d;
  std::optional<FineMesh::Structure> st;
  if (nx > 0 && ny > 0) st = FineMesh::Structure{static_cast<int>(nx), static_cast<int>(ny)};
  d.mesh = FineMesh(std::move(nodes), std::move(tris), st);
  d.continua = ContinuumMap(std::move(idx), static_cast<int>(nc));
  d.state.t = r.get<double>();
  const auto nx_state = r.get_count(kMaxCount);
  if (nx_state != 3 * nn) throw Error(ErrorKind::Io, path.string() + ": state does not match the mesh");
  d.state.x.resize(nx_state);
  r.get_doubles(d.state.x.data(), static_cast<std::size_t>(nx_state));
  return d;
}

MacroDump read_macro_dump(const std::filesystem::path& path) {
  Reader r(path);
  if (r.header() != DumpKind::Macro) throw Error(ErrorKind::Io, path.string() + " is not a macro-state dump");
  MacroDump d;
  d.coarse_n = static_cast<int>(r.get_count(1 << 20));
  d.domain.x0 = r.get<double>();
  d.domain.y0 = r.get<double>();
  d.domain.x1 = r.get<double>();
  d.domain.y1 = r.get<double>();
  d.n_continua = static_cast<int>(r.get_count(1 << 20));
  const auto len = r.get_count(256);
  d.variant.resize(static_cast<std::size_t>(len));
  for (auto& ch : d.variant) ch = r.get<char>();
  d.state.t = r.get<double>();
  const auto n = r.get_count(kMaxCount);
  const MacroLayout layout(d.n_continua, (d.coarse_n + 1) * (d.coarse_n + 1));
  if (n != layout.size()) throw Error(ErrorKind::Io, path.string() + ": state does not match the coarse grid");
  d.state.x.resize(n);
  r.get_doubles(d.state.x.data(), static_cast<std::size_t>(n));
  return d;
}

void write_error_table(std::ostream& out, const std::vector<ErrorReport>& reports, int n_continua) {
  out << "grid,variant";
  for (int i = 1; i <= n_continua; ++i) out << ",e_p_" << i;
  for (int i = 1; i <= n_continua; ++i) out << ",e_u_" << i;
  out << '\n';
  for (const auto& r : reports) {
    out << grid_label(r.coarse_n) << ',' << r.variant;
    for (double e : r.e_p) out << ',' << fmt("%.6e", e);
    for (double e : r.e_u) out << ',' << fmt("%.6e", e);
    out << '\n';
  }
}

void write_error_history(std::ostream& out, const std::vector<ErrorHistoryRow>& rows, int n_continua) {
  out << "grid,variant,step,t";
  for (int i = 1; i <= n_continua; ++i) out << ",e_p_" << i;
  for (int i = 1; i <= n_continua; ++i) out << ",e_u_" << i;
  out << '\n';
  for (const auto& row : rows) {
    out << grid_label(row.report.coarse_n) << ',' << row.report.variant << ',' << row.step << ','
        << fmt("%.6e", row.t);
    for (double e : row.report.e_p) out << ',' << fmt("%.6e", e);
    for (double e : row.report.e_u) out << ',' << fmt("%.6e", e);
    out << '\n';
  }
}

void write_tensors_csv(std::ostream& out, const std::vector<EffectiveTensors>& tensors) {
  out << "block,n_continua,clipped,rve_area,entry,row,col,value\n";
  for (const auto& t : tensors) {
    const std::string prefix = std::to_string(t.block) + ',' + std::to_string(t.n_continua) + ',' +
                               (t.clipped ? "1" : "0") + ',' + fmt("%.17g", t.rve_area) + ',';
    for (int k = 0; k < kFamilyCount; ++k) {
      const auto& m = t.families[static_cast<std::size_t>(k)];
      const std::string name = FamilyId::from_index(k).name();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          out << prefix << name << ',' << r << ',' << c << ',' << fmt("%.17g", m(r, c)) << '\n';
        }
      }
    }
    for (Eigen::Index r = 0; r < t.source_u.size(); ++r) {
      out << prefix << "F_u," << r << ",0," << fmt("%.17g", t.source_u[r]) << '\n';
    }
    for (Eigen::Index r = 0; r < t.source_p.size(); ++r) {
      out << prefix << "F_p," << r << ",0," << fmt("%.17g", t.source_p[r]) << '\n';
    }
  }
}

std::vector<EffectiveTensors> read_tensors_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("block,", 0) != 0) {
    throw Error(ErrorKind::Io, "tensor table has no header");
  }
  std::map<int, EffectiveTensors> by_block;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<std::string, 8> f;
    std::istringstream ls(line);
    for (auto& cell : f) {
      if (!std::getline(ls, cell, ',')) throw Error(ErrorKind::Io, "tensor table line " + std::to_string(line_no) + " is short");
    }
    try {
      const int block = std::stoi(f[0]);
      const int n = std::stoi(f[1]);
      auto it = by_block.find(block);
      if (it == by_block.end()) {
        it = by_block.emplace(block, EffectiveTensors::zeros(block, n)).first;
        it->second.clipped = f[2] == "1";
        it->second.rve_area = std::stod(f[3]);
      }
      auto& t = it->second;
      const int r = std::stoi(f[5]);
      const int c = std::stoi(f[6]);
      const double v = std::stod(f[7]);
      Eigen::MatrixXd* m = nullptr;
      if (f[4] == "F_u" || f[4] == "F_p") {
        Eigen::VectorXd& vec = f[4] == "F_u" ? t.source_u : t.source_p;
        if (r < 0 || r >= vec.size() || c != 0) throw Error(ErrorKind::Io, "source index out of range");
        vec[r] = v;
        continue;
      }
      m = &t.family(FamilyId::parse(f[4]));
      if (r < 0 || c < 0 || r >= m->rows() || c >= m->cols()) throw Error(ErrorKind::Io, "tensor index out of range");
      (*m)(r, c) = v;
    } catch (const Error& e) {
      throw Error(ErrorKind::Io, "tensor table line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception&) {
      throw Error(ErrorKind::Io, "tensor table line " + std::to_string(line_no) + " is malformed");
    }
  }
  std::vector<EffectiveTensors> out;
  out.reserve(by_block.size());
  for (auto& [b, t] : by_block) out.push_back(std::move(t));
  return out;
}

}  // namespace mcporo
