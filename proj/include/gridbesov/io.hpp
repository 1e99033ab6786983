#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gridbesov/coeffs.hpp"
#include "gridbesov/particles.hpp"
#include "gridbesov/step.hpp"

namespace gb {

using Json = nlohmann::json;

std::string path_to_string(const std::vector<uint32_t>& path);
std::vector<uint32_t> string_to_path(const std::string& text);

std::string read_text_file(const std::string& file);
void write_text_file(const std::string& file, const std::string& content);

Json grid_to_json(const GoodGrid& g);
GoodGrid grid_from_json(const Json& j, NumericMode mode = NumericMode::rational,
                        bool run_validate = true);
void save_grid(const GoodGrid& g, const std::string& file);
GoodGrid load_grid(const std::string& file, NumericMode mode = NumericMode::rational,
                   bool run_validate = true);

/// Shortest double text that round-trips.
std::string fmt_double(double v);

// Scalars: rationals travel as "p/q" strings, complex values as [re, im].
// Readers accept strings, numbers and pairs in either mode.
template <class F>
Json scalar_to_json(const F& v);
template <class F>
F scalar_from_json(const Json& j);

template <>
inline Json scalar_to_json<Rational>(const Rational& v) {
  return rat_str(v);
}
template <>
inline Json scalar_to_json<Cplx>(const Cplx& v) {
  return Json::array({v.real(), v.imag()});
}

namespace detail {
inline Rational rational_of_json(const Json& j) {
  if (j.is_string()) return rat_parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number_float()) {
    Rational q;
    mpq_set_d(q.get_mpq_t(), j.get<double>());  // exact binary expansion
    return q;
  }
  fail(Errc::parse_error, "expected a rational value");
}
}  // namespace detail

template <>
inline Rational scalar_from_json<Rational>(const Json& j) {
  if (j.is_array()) {
    if (j.size() != 2) fail(Errc::parse_error, "expected [re, im]");
    const Rational im = detail::rational_of_json(j[1]);
    if (sgn(im) != 0)
      fail(Errc::invalid_argument, "rational mode cannot hold a complex value");
    return detail::rational_of_json(j[0]);
  }
  return detail::rational_of_json(j);
}
template <>
inline Cplx scalar_from_json<Cplx>(const Json& j) {
  if (j.is_array()) {
    if (j.size() != 2) fail(Errc::parse_error, "expected [re, im]");
    return {detail::rational_of_json(j[0]).get_d(), detail::rational_of_json(j[1]).get_d()};
  }
  return {detail::rational_of_json(j).get_d(), 0.0};
}

template <class F>
Json step_to_json(const StepFunction<F>& f) {
  Json values = Json::array();
  for (const F& v : f.values) values.push_back(scalar_to_json<F>(v));
  return Json{{"schema", "gridbesov.step/1"},
              {"mode", ScalarOps<F>::mode_name()},
              {"level", f.level},
              {"values", std::move(values)}};
}

template <class F>
StepFunction<F> step_from_json(const GoodGrid& g, const Json& j) {
  const int level = j.at("level").get<int>();
  if (level < 0 || level > g.depth()) fail(Errc::level_out_of_range, "step function level");
  const Json& values = j.at("values");
  if (static_cast<int64_t>(values.size()) != g.cell_count(level))
    fail(Errc::parse_error, "value count does not match the level");
  StepFunction<F> f{&g, level, {}};
  f.values.reserve(values.size());
  for (const Json& v : values) f.values.push_back(scalar_from_json<F>(v));
  return f;
}

template <class F>
Json config_to_json(const ParticleConfig<F>& config) {
  Json out = Json::array();
  for (const Particle<F>& p : config) {
    Json mass;
    if constexpr (std::is_same_v<F, Rational>) {
      mass = Json::array({rat_str(p.mass), "0"});
    } else {
      mass = Json::array({p.mass.real(), p.mass.imag()});
    }
    out.push_back(Json{{"mass", std::move(mass)}, {"path", p.location.path}});
  }
  return out;
}

template <class F>
ParticleConfig<F> config_from_json(const Json& j) {
  ParticleConfig<F> out;
  for (const Json& e : j) {
    Particle<F> p;
    p.mass = scalar_from_json<F>(e.at("mass"));
    p.location.path = e.at("path").get<std::vector<uint32_t>>();
    out.push_back(std::move(p));
  }
  return out;
}

// Coefficient dump, one row per term plus a constant row at level -1:
//   level, cell_path, pair_index, convention, s, re, im
// Values are written in the tagged convention. plain + rational dumps are
// exact ("p/q" in the re column); the scaled conventions are decimal.
template <class F>
void save_coeffs_csv(const DistCoeffs<F>& c, const std::string& file) {
  std::ostringstream out;
  out << "level,cell_path,pair_index,convention,s,re,im\n";
  auto emit = [&](int level, const std::string& path, int pair, const F& plain, double scale) {
    out << level << ',' << path << ',' << pair << ',' << convention_name(c.conv) << ','
        << fmt_double(c.s) << ',';
    if constexpr (std::is_same_v<F, Rational>) {
      if (c.conv == Convention::plain) {
        out << rat_str(plain) << ",0\n";
        return;
      }
    }
    const Cplx v = ScalarOps<F>::view(plain) * scale;
    out << fmt_double(v.real()) << ',' << fmt_double(v.imag()) << '\n';
  };
  emit(-1, "", -1, c.constant, 1.0);
  for (const auto& [w, v] : c.terms)
    emit(w.level, path_to_string(c.grid->path_of({w.level, w.cell})), w.pair, v,
         view_scale(c.conv, c.grid->measure_d({w.level, w.cell}), c.s));
  write_text_file(file, out.str());
}

std::vector<std::string> split_csv_line(const std::string& line);

template <class F>
DistCoeffs<F> load_coeffs_csv(const GoodGrid& g, const std::string& file) {
  std::istringstream in(read_text_file(file));
  std::string line;
  if (!std::getline(in, line)) fail(Errc::parse_error, "empty coefficient dump");
  DistCoeffs<F> out{&g, 0.0, Convention::plain, F(0), {}};
  bool first_row = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 7) fail(Errc::parse_error, "expected 7 columns: " + line);
    const int level = std::stoi(f[0]);
    const Convention conv = convention_parse(f[3]);
    const double s = std::stod(f[4]);
    if (first_row) {
      out.conv = conv;
      out.s = s;
      first_row = false;
    } else if (conv != out.conv || s != out.s) {
      fail(Errc::parse_error, "mixed conventions or smoothness in one dump");
    }

    F plain;
    const bool exact_field = f[5].find('/') != std::string::npos ||
                             (conv == Convention::plain && f[6] == "0" &&
                              f[5].find_first_of(".eE") == std::string::npos);
    double scale = 1.0;
    WaveletKey w{};
    bool is_constant = level < 0;
    if (!is_constant) {
      const std::vector<uint32_t> path = string_to_path(f[1]);
      if (static_cast<int>(path.size()) != level)
        fail(Errc::parse_error, "cell path does not match level");
      const CellRef owner = g.resolve(path);
      const int pair = std::stoi(f[2]);
      if (pair < 0 || static_cast<size_t>(pair) >= g.pairs(owner).size())
        fail(Errc::parse_error, "pair index out of range");
      w = WaveletKey{owner.level, owner.index, pair};
      scale = view_scale(conv, g.measure_d(owner), s);
    }
    if constexpr (std::is_same_v<F, Rational>) {
      if (exact_field && conv == Convention::plain) {
        plain = rat_parse(f[5]);
      } else {
        if (std::stod(f[6]) != 0.0)
          fail(Errc::invalid_argument, "rational mode cannot hold a complex value");
        Rational q;
        mpq_set_d(q.get_mpq_t(), std::stod(f[5]) / scale);
        plain = q;
      }
    } else {
      plain = Cplx(std::stod(f[5]) / scale, std::stod(f[6]) / scale);
    }
    if (is_constant)
      out.constant = plain;
    else
      out.add(w, plain);
  }
  return out;
}

}  // namespace gb
