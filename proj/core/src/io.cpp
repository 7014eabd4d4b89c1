#include "radonms/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

namespace radonms {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError("not a number: '" + s + "'");
  return v;
}

long parse_int(const std::string& raw) {
  const std::string s = trim(raw);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError("not an integer: '" + s + "'");
  return v;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) out.push_back(line);
  }
  return out;
}

// key=value pairs separated by ';'.
std::vector<std::pair<std::string, std::string>> header_fields(const std::string& line) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& part : split(line, ';')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ParseError("header field without '=': '" + part + "'");
    out.emplace_back(trim(part.substr(0, eq)), trim(part.substr(eq + 1)));
  }
  return out;
}

const std::string& field(const std::vector<std::pair<std::string, std::string>>& h,
                         const std::string& key) {
  for (const auto& [k, v] : h)
    if (k == key) return v;
  throw ParseError("header lacks '" + key + "'");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const std::string& p : split(s, ',')) out.push_back(parse_double(p));
  return out;
}

std::string join(std::span<const double> v, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(sep);
    out += format_double(v[i]);
  }
  return out;
}

std::string pgm(int width, int height, const std::vector<double>& v, const std::string& note) {
  double lo = 0.0, hi = 0.0;
  if (!v.empty()) {
    const auto [a, b] = std::minmax_element(v.begin(), v.end());
    lo = *a;
    hi = *b;
  }
  std::ostringstream out;
  out << "P5\n# " << note << "\n# affine min-max scaling: pixel = round(255 * (v - min) / (max - min)); min="
      << format_double(lo) << " max=" << format_double(hi) << "\n"
      << width << " " << height << "\n255\n";
  std::string s = out.str();
  for (double x : v) {
    const double t = hi > lo ? (x - lo) / (hi - lo) : 0.0;
    s.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t))));
  }
  return s;
}

json vec_json(const Vec3& v, int ndim) {
  json a = json::array();
  for (int i = 0; i < ndim; ++i) a.push_back(v[i]);
  return a;
}

Vec3 json_vec(const json& j, int ndim, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != ndim)
    throw ParseError(std::string(what) + " must be an array of " + std::to_string(ndim) + " numbers");
  Vec3 v{0.0, 0.0, 0.0};
  for (int i = 0; i < ndim; ++i) v[i] = j.at(i).get<double>();
  return v;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::random_device rd;
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string image_to_csv(const Image& f) {
  const ImageGrid& g = f.grid();
  const int nd = g.ndim();
  std::vector<double> spacing, origin;
  for (int a = 0; a < nd; ++a) {
    spacing.push_back(g.spacing(a));
    origin.push_back(g.origin(a));
  }
  std::string out = "dims=";
  for (int a = 0; a < nd; ++a) out += (a ? "," : "") + std::to_string(g.dim(a));
  out += ";spacing=" + join(spacing) + ";origin=" + join(origin) + "\n";
  const std::size_t row = static_cast<std::size_t>(g.dim(0));
  for (std::size_t r = 0; r < f.size() / row; ++r) {
    out += join(f.values().subspan(r * row, row));
    out.push_back('\n');
  }
  return out;
}

Image image_from_csv(const std::string& text) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty()) throw ParseError("image CSV: empty input");
  const auto h = header_fields(lines[0]);
  std::vector<int> dims;
  for (const std::string& d : split(field(h, "dims"), ',')) dims.push_back(static_cast<int>(parse_int(d)));
  const std::vector<double> spacing = parse_list(field(h, "spacing"));
  const std::vector<double> origin = parse_list(field(h, "origin"));
  if (spacing.size() != dims.size() || origin.size() != dims.size())
    throw ParseError("image CSV: dims, spacing and origin lengths differ");
  ImageGrid grid(dims, spacing, origin);
  std::vector<double> values;
  values.reserve(grid.cell_count());
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const std::vector<double> row = parse_list(lines[l]);
    if (static_cast<int>(row.size()) != dims[0])
      throw ParseError("image CSV: row " + std::to_string(l) + " has " + std::to_string(row.size()) +
                       " values, expected " + std::to_string(dims[0]));
    values.insert(values.end(), row.begin(), row.end());
  }
  if (values.size() != grid.cell_count())
    throw ParseError("image CSV: expected " + std::to_string(grid.cell_count()) + " values, got " +
                     std::to_string(values.size()));
  return Image(grid, std::move(values));
}

std::string sinogram_to_csv(const Sinogram& g) {
  const ProjectionGeometry& geo = g.geometry();
  std::string out = "n_offsets=" + std::to_string(geo.n_offsets()) +
                    ";offset_spacing=" + format_double(geo.offset_spacing()) +
                    ";xmax=" + format_double(geo.x_max()) + ";directions=";
  for (int j = 0; j < geo.n_directions(); ++j) {
    if (j) out.push_back(',');
    const Vec3& d = geo.direction(j);
    for (int a = 0; a < geo.ndim(); ++a) {
      if (a) out.push_back(':');
      out += format_double(d[a]);
    }
    out += "@" + format_double(geo.weight(j));
  }
  out.push_back('\n');
  for (int j = 0; j < geo.n_directions(); ++j) {
    out += join(g.profile(j));
    out.push_back('\n');
  }
  return out;
}

Sinogram sinogram_from_csv(const std::string& text, const fs::path& base_dir) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty()) throw ParseError("sinogram CSV: empty input");
  const auto h = header_fields(lines[0]);
  const int n_off = static_cast<int>(parse_int(field(h, "n_offsets")));
  const double x_max = parse_double(field(h, "xmax"));
  const double spacing = parse_double(field(h, "offset_spacing"));
  const std::string dirs = field(h, "directions");

  std::optional<ProjectionGeometry> geo;
  if (!dirs.empty() && dirs[0] == '@') {
    geo.emplace(geometry_from_json(read_file(base_dir / dirs.substr(1))));
    if (geo->n_offsets() != n_off || geo->x_max() != x_max)
      throw ParseError("sinogram CSV: header disagrees with the geometry file");
  } else {
    std::vector<Vec3> d;
    std::vector<double> w;
    int nd = 0;
    for (const std::string& entry : split(dirs, ',')) {
      const auto at = entry.find('@');
      if (at == std::string::npos) throw ParseError("sinogram CSV: direction without '@weight'");
      const std::vector<std::string> comp = split(entry.substr(0, at), ':');
      if (comp.size() < 2 || comp.size() > 3) throw ParseError("sinogram CSV: direction needs 2 or 3 components");
      if (nd == 0) nd = static_cast<int>(comp.size());
      if (static_cast<int>(comp.size()) != nd) throw ParseError("sinogram CSV: mixed direction dimensions");
      Vec3 v{0.0, 0.0, 0.0};
      for (int a = 0; a < nd; ++a) v[a] = parse_double(comp[a]);
      d.push_back(v);
      w.push_back(parse_double(entry.substr(at + 1)));
    }
    geo.emplace(nd, std::move(d), std::move(w), n_off, x_max);
  }
  if (std::abs(geo->offset_spacing() - spacing) > 1e-12 * std::max(1.0, std::abs(spacing)))
    throw ParseError("sinogram CSV: offset_spacing disagrees with n_offsets and xmax");
  if (static_cast<int>(lines.size()) - 1 != geo->n_directions())
    throw ParseError("sinogram CSV: expected " + std::to_string(geo->n_directions()) +
                     " direction rows, got " + std::to_string(lines.size() - 1));
  std::vector<double> values;
  values.reserve(geo->sample_count());
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const std::vector<double> row = parse_list(lines[l]);
    if (static_cast<int>(row.size()) != n_off)
      throw ParseError("sinogram CSV: row " + std::to_string(l) + " has the wrong length");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Sinogram(std::move(*geo), std::move(values));
}

std::string image_to_pgm(const Image& f) {
  const ImageGrid& g = f.grid();
  const int w = g.dim(0), h = g.dim(1);
  const int k = g.ndim() == 3 ? g.dim(2) / 2 : 0;
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(w) * h);
  // Top row is the largest y.
  for (int j = h - 1; j >= 0; --j)
    for (int i = 0; i < w; ++i) v.push_back(f.at({i, j, k}));
  const std::string note = g.ndim() == 3 ? "central slice z index " + std::to_string(k) : "image";
  return pgm(w, h, v, note);
}

std::string sinogram_to_pgm(const Sinogram& g) {
  const ProjectionGeometry& geo = g.geometry();
  return pgm(geo.n_offsets(), geo.n_directions(), {g.values().begin(), g.values().end()},
             "sinogram: rows are directions, columns are offsets");
}

PhantomSpec phantom_from_json(const std::string& text) {
  const json j = parse_json(text);
  const json& list = j.is_object() && j.contains("components") ? j.at("components") : j;
  if (!list.is_array()) throw ParseError("phantom JSON must be a list of components");
  PhantomSpec spec;
  try {
    for (const json& c : list) {
      EllipsoidComponent e;
      const int nd = static_cast<int>(c.at("center").size());
      if (nd < 2 || nd > 3) throw ParseError("phantom component center must have 2 or 3 entries");
      e.center = json_vec(c.at("center"), nd, "center");
      if (c.contains("semi_axes")) {
        e.semi_axes = json_vec(c.at("semi_axes"), nd, "semi_axes");
        if (nd == 2) e.semi_axes[2] = 1.0;
      } else if (c.contains("radius")) {
        const double r = c.at("radius").get<double>();
        e.semi_axes = {r, r, nd == 3 ? r : 1.0};
      } else {
        throw ParseError("phantom component needs semi_axes or radius");
      }
      if (c.contains("angle")) e.angle = c.at("angle").get<double>();
      if (c.contains("angle_deg")) e.angle = c.at("angle_deg").get<double>() * std::acos(-1.0) / 180.0;
      e.value = c.at("value").get<double>();
      spec.components.push_back(e);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("phantom JSON: ") + e.what());
  }
  return spec;
}

std::string phantom_to_json(const PhantomSpec& spec, int nd) {
  json list = json::array();
  for (const EllipsoidComponent& c : spec.components) {
    list.push_back({{"center", vec_json(c.center, nd)},
                    {"semi_axes", vec_json(c.semi_axes, nd)},
                    {"angle", c.angle},
                    {"value", c.value}});
  }
  return list.dump(2) + "\n";
}

ProjectionGeometry geometry_from_json(const std::string& text) {
  const json j = parse_json(text);
  try {
    const int nd = j.at("ndim").get<int>();
    const int n_off = j.at("n_offsets").get<int>();
    const double x_max = j.at("x_max").get<double>();
    if (j.contains("directions")) {
      std::vector<Vec3> d;
      for (const json& v : j.at("directions")) d.push_back(json_vec(v, nd, "direction"));
      std::vector<double> w = j.contains("weights") ? j.at("weights").get<std::vector<double>>()
                                                    : std::vector<double>(d.size(), 1.0);
      if (w.size() != d.size()) throw ParseError("geometry JSON: weights and directions differ in length");
      return ProjectionGeometry(nd, std::move(d), std::move(w), n_off, x_max);
    }
    if (nd == 2) return ProjectionGeometry::parallel_2d(j.at("n_angles").get<int>(), n_off, x_max);
    if (nd == 3) return ProjectionGeometry::hemisphere_3d(j.at("n_directions").get<int>(), n_off, x_max);
    throw ParseError("geometry JSON: ndim must be 2 or 3");
  } catch (const json::exception& e) {
    throw ParseError(std::string("geometry JSON: ") + e.what());
  }
}

std::string geometry_to_json(const ProjectionGeometry& geo) {
  json d = json::array();
  for (int k = 0; k < geo.n_directions(); ++k) d.push_back(vec_json(geo.direction(k), geo.ndim()));
  const json j = {{"ndim", geo.ndim()},
                  {"n_offsets", geo.n_offsets()},
                  {"x_max", geo.x_max()},
                  {"directions", d},
                  {"weights", std::vector<double>(geo.weights().begin(), geo.weights().end())}};
  return j.dump(2) + "\n";
}

std::string partition_to_csv(const Partition& p) {
  Image f(p.grid());
  for (std::size_t c = 0; c < f.size(); ++c) f[c] = p.label(c);
  return image_to_csv(f);
}

Partition partition_from_csv(const std::string& text, int m, double delta) {
  const Image f = image_from_csv(text);
  std::vector<int> labels;
  for (double v : f.values()) {
    if (v != std::round(v)) throw ParseError("partition CSV: non-integer label");
    labels.push_back(static_cast<int>(v));
  }
  return Partition(f.grid(), m, std::move(labels), delta);
}

std::string partition_to_pgm(const Partition& p) {
  Image f(p.grid());
  for (std::size_t c = 0; c < f.size(); ++c) f[c] = p.label(c);
  return image_to_pgm(f);
}

std::string energy_trace_csv(const std::vector<EnergyBreakdown>& trace) {
  std::string out = "iter,fidelity,perimeter,total\n";
  for (std::size_t k = 0; k < trace.size(); ++k)
    out += std::to_string(k) + "," + format_double(trace[k].fidelity) + "," +
           format_double(trace[k].perimeter) + "," + format_double(trace[k].total) + "\n";
  return out;
}

std::string spectrum_sigma_csv(const SpectrumReport& r) {
  std::string out = "k,sigma\n";
  for (std::size_t k = 0; k < r.sigma.size(); ++k)
    out += std::to_string(k + 1) + "," + format_double(r.sigma[k]) + "\n";
  return out;
}

std::string spectrum_norm_csv(const SpectrumReport& r) {
  const bool bl = !r.band_limited_norms.empty();
  std::string out = bl ? "gamma,tsvd_norm,tikhonov_norm,band_limited_norm\n"
                       : "gamma,tsvd_norm,tikhonov_norm\n";
  for (std::size_t k = 0; k < r.gammas.size(); ++k) {
    out += format_double(r.gammas[k]) + "," + format_double(r.tsvd_norms[k]) + "," +
           format_double(r.tikhonov_norms[k]);
    if (bl) out += "," + format_double(r.band_limited_norms[k]);
    out += "\n";
  }
  return out;
}

std::string residual_report_json(const ResidualReport& r) {
  const json j = {{"check", r.check},
                  {"resolution", r.resolution},
                  {"residual", r.residual},
                  {"refinement_trend", r.refinement_trend},
                  {"tolerance", r.tolerance},
                  {"passed", r.passed}};
  return j.dump();
}

}  // namespace radonms
