#include "gridbesov/io.hpp"

#include <cstdlib>

namespace gb {

const char* convention_name(Convention c) {
  switch (c) {
    case Convention::plain: return "plain";
    case Convention::besov_plus: return "bplus";
    case Convention::besov_minus: return "bminus";
  }
  return "plain";
}

Convention convention_parse(const std::string& name) {
  if (name == "plain") return Convention::plain;
  if (name == "bplus") return Convention::besov_plus;
  if (name == "bminus") return Convention::besov_minus;
  fail(Errc::parse_error, "unknown convention '" + name + "'");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // trim to the shortest representation that round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char probe[40];
    std::snprintf(probe, sizeof probe, "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == v) return probe;
  }
  return buf;
}

std::string path_to_string(const std::vector<uint32_t>& path) {
  std::string s;
  for (size_t i = 0; i < path.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(path[i]);
  }
  return s;
}

std::vector<uint32_t> string_to_path(const std::string& text) {
  std::vector<uint32_t> path;
  if (text.empty()) return path;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t dot = text.find('.', pos);
    const std::string part = text.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (part.empty()) fail(Errc::parse_error, "bad cell path '" + text + "'");
    path.push_back(static_cast<uint32_t>(std::stoul(part)));
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return path;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  size_t pos = 0;
  while (true) {
    const size_t comma = line.find(',', pos);
    fields.push_back(line.substr(pos, comma == std::string::npos ? comma : comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return fields;
}

std::string read_text_file(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(Errc::parse_error, "cannot open '" + file + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary);
  if (!out) fail(Errc::parse_error, "cannot write '" + file + "'");
  out << content;
}

namespace {

Json cell_to_json(const GoodGrid& g, CellRef r) {
  Json j{{"measure", rat_str(g.measure(r))}};
  if (r.level < g.depth()) {
    Json children = Json::array();
    for (int i = 0; i < g.child_count(r); ++i) children.push_back(cell_to_json(g, g.child(r, i)));
    j["children"] = std::move(children);
  }
  return j;
}

CellSpec cell_from_json(const Json& j) {
  CellSpec spec;
  spec.measure = detail::rational_of_json(j.at("measure"));
  if (j.contains("children"))
    for (const Json& c : j.at("children")) spec.children.push_back(cell_from_json(c));
  return spec;
}

}  // namespace

Json grid_to_json(const GoodGrid& g) {
  return Json{{"schema", "gridbesov.grid/1"},
              {"lambda", rat_str(g.lambda())},
              {"lambda_star", rat_str(g.lambda_star())},
              {"cell", cell_to_json(g, {0, 0})}};
}

GoodGrid grid_from_json(const Json& j, NumericMode mode, bool run_validate) {
  GoodGrid g = make_grid(cell_from_json(j.at("cell")),
                         detail::rational_of_json(j.at("lambda")),
                         detail::rational_of_json(j.at("lambda_star")));
  if (run_validate) {
    const ValidationReport rep = validate(g, mode);
    if (!rep.pass) fail(Errc::parse_error, "grid file fails validation:\n" + rep.summary());
  }
  return g;
}

void save_grid(const GoodGrid& g, const std::string& file) {
  write_text_file(file, grid_to_json(g).dump(1) + "\n");
}

GoodGrid load_grid(const std::string& file, NumericMode mode, bool run_validate) {
  return grid_from_json(Json::parse(read_text_file(file)), mode, run_validate);
}

}  // namespace gb
