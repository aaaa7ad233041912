#pragma once
#include <fstream>
#include <string>

#include "json.hpp"
#include "majtherm/majorization.hpp"
#include "majtherm/prob.hpp"
#include "majtherm/quantum.hpp"
#include "majtherm/thermo.hpp"

namespace majtherm::io {

using nlohmann::json;

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return j;
}

// Finite doubles stay numbers; +-infinity becomes "inf"/"-inf" (JSON has no
// infinities and nlohmann would emit null).
inline json num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double require_number(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ValidationError(what + ": expected a number");
}

inline std::vector<double> dvec_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + ": expected an array");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(require_number(x, what));
  return v;
}

inline ProbVec prob_from_json(const json& j, bool normalize = false) {
  if (!j.is_object() || !j.contains("p")) throw ValidationError("expected {\"p\": [..]}");
  return ProbVec(dvec_from_json(j.at("p"), "p"), normalize);
}

inline json prob_to_json(const ProbVec& p) {
  json arr = json::array();
  for (int i = 0; i < p.dim(); ++i) arr.push_back(p[i]);
  return json{{"p", std::move(arr)}};
}

inline GibbsSpec gibbs_from_json(const json& j) {
  if (!j.is_object() || !j.contains("energies") || !j.contains("beta"))
    throw ValidationError("expected {\"energies\": [..], \"beta\": x}");
  return GibbsSpec(dvec_from_json(j.at("energies"), "energies"),
                   require_number(j.at("beta"), "beta"));
}

inline json gibbs_to_json(const GibbsSpec& g) {
  return json{{"energies", g.energies}, {"beta", g.beta}};
}

// Real matrices: row-major nested arrays of numbers.
inline Eigen::MatrixXd dmatrix_from_json(const json& j) {
  const json& rows = j.is_object() && j.contains("matrix") ? j.at("matrix") : j;
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw ValidationError("expected a nested array matrix");
  const auto nr = rows.size(), nc = rows[0].size();
  Eigen::MatrixXd m(nr, nc);
  for (std::size_t i = 0; i < nr; ++i) {
    if (!rows[i].is_array() || rows[i].size() != nc)
      throw ValidationError("ragged matrix rows");
    for (std::size_t k = 0; k < nc; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          require_number(rows[i][k], "matrix entry");
  }
  return m;
}

inline json dmatrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(std::move(r));
  }
  return rows;
}

// Complex matrices: row-major nested arrays of [re, im]; bare numbers are
// accepted as real entries.
inline CMat cmatrix_from_json(const json& j) {
  const json& rows = j.is_object() && j.contains("matrix") ? j.at("matrix") : j;
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw ValidationError("expected a nested array matrix");
  const auto nr = rows.size(), nc = rows[0].size();
  CMat m(nr, nc);
  for (std::size_t i = 0; i < nr; ++i) {
    if (!rows[i].is_array() || rows[i].size() != nc)
      throw ValidationError("ragged matrix rows");
    for (std::size_t k = 0; k < nc; ++k) {
      const json& e = rows[i][k];
      std::complex<double> z;
      if (e.is_number()) {
        z = e.get<double>();
      } else if (e.is_array() && e.size() == 2) {
        z = {require_number(e[0], "re"), require_number(e[1], "im")};
      } else {
        throw ValidationError("matrix entry: expected number or [re, im]");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = z;
    }
  }
  return m;
}

inline json cmatrix_to_json(const CMat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k)
      r.push_back(json::array({m(i, k).real(), m(i, k).imag()}));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline DensityMatrix density_from_json(const json& j) {
  return DensityMatrix(cmatrix_from_json(j));
}

// Channels: list of Kraus matrices, either bare or under a "kraus" key.
inline std::vector<CMat> kraus_from_json(const json& j) {
  const json& list = j.is_object() && j.contains("kraus") ? j.at("kraus") : j;
  if (!list.is_array() || list.empty()) throw ValidationError("expected a list of Kraus matrices");
  std::vector<CMat> out;
  out.reserve(list.size());
  for (const auto& k : list) out.push_back(cmatrix_from_json(k));
  return out;
}

inline json kraus_to_json(const std::vector<CMat>& kraus) {
  json list = json::array();
  for (const auto& k : kraus) list.push_back(cmatrix_to_json(k));
  return list;
}

// Hamiltonian + beta; accepts diagonal form {"energies", "beta"} or a full
// matrix under "hamiltonian".
inline QGibbsSpec qgibbs_from_json(const json& j) {
  if (!j.is_object() || !j.contains("beta"))
    throw ValidationError("expected {\"energies\"|\"hamiltonian\": .., \"beta\": x}");
  const double beta = require_number(j.at("beta"), "beta");
  if (j.contains("hamiltonian")) return QGibbsSpec(cmatrix_from_json(j.at("hamiltonian")), beta);
  if (j.contains("energies")) {
    auto e = dvec_from_json(j.at("energies"), "energies");
    CMat h = CMat::Zero(static_cast<Eigen::Index>(e.size()), static_cast<Eigen::Index>(e.size()));
    for (std::size_t i = 0; i < e.size(); ++i)
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = e[i];
    return QGibbsSpec(std::move(h), beta);
  }
  throw ValidationError("expected \"energies\" or \"hamiltonian\"");
}

inline json lorenz_to_json(const LorenzCurve& c) {
  json pts = json::array();
  for (const auto& [x, y] : c.points) pts.push_back(json::array({x, y}));
  return json{{"kind", c.kind == LorenzKind::ordinary ? "ordinary" : "relative"},
              {"points", std::move(pts)}};
}

inline void write_lorenz_csv(const LorenzCurve& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << "x,y\n";
  out.precision(17);
  for (const auto& [x, y] : c.points) out << x << ',' << y << '\n';
}

}  // namespace majtherm::io
