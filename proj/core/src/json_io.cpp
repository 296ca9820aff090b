#include "qcorr/json_io.hpp"

#include <fstream>

#include "qcorr/errors.hpp"

namespace qcorr {

Json layout_to_json(const SystemLayout& layout) {
  Json out = Json::array();
  for (const Subsystem& s : layout.subsystems()) out.push_back({s.label, s.dim});
  return out;
}

SystemLayout layout_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("layout must be an array of [label, dim]");
  std::vector<Subsystem> subs;
  for (const Json& e : j) {
    if (!e.is_array() || e.size() != 2)
      throw ParseError("layout entry must be [label, dim]");
    subs.push_back({e[0].get<std::string>(), e[1].get<std::size_t>()});
  }
  return SystemLayout(std::move(subs));
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json re = Json::array(), im = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json re_row = Json::array(), im_row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      re_row.push_back(m(i, j).real());
      im_row.push_back(m(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return Json{{"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.contains("re") || !j.contains("im"))
    throw ParseError("matrix JSON needs re and im arrays");
  const Json& re = j.at("re");
  const Json& im = j.at("im");
  const std::size_t rows = re.size();
  if (rows == 0 || im.size() != rows) throw ParseError("re/im row count mismatch");
  const std::size_t cols = re[0].size();
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (re[i].size() != cols || im[i].size() != cols)
      throw ParseError("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(i, c) = cplx(re[i][c].get<double>(), im[i][c].get<double>());
  }
  if (!m.all_finite()) throw ParseError("non-finite matrix entry");
  return m;
}

Json state_to_json(const DensityMatrix& rho) {
  Json out;
  out["layout"] = layout_to_json(rho.layout());
  Json m = matrix_to_json(rho.matrix());
  out["re"] = std::move(m["re"]);
  out["im"] = std::move(m["im"]);
  return out;
}

DensityMatrix state_from_json(const Json& j, const ToleranceProfile& tol) {
  if (!j.contains("layout")) throw ParseError("state JSON needs a layout");
  SystemLayout layout = layout_from_json(j.at("layout"));
  ComplexMatrix m = matrix_from_json(j);
  if (m.rows() != layout.total_dim() || m.cols() != layout.total_dim())
    throw ParseError("matrix size does not match layout dimension " +
                     std::to_string(layout.total_dim()));
  return DensityMatrix::validated(std::move(layout), std::move(m), tol);
}

Json channel_to_json(const Channel& ch) {
  Json out;
  out["in_layout"] = layout_to_json(ch.in_layout());
  out["out_layout"] = layout_to_json(ch.out_layout());
  Json kraus = Json::array();
  for (const ComplexMatrix& k : ch.kraus()) kraus.push_back(matrix_to_json(k));
  out["kraus"] = std::move(kraus);
  return out;
}

Channel channel_from_json(const Json& j) {
  SystemLayout in = layout_from_json(j.at("in_layout"));
  SystemLayout out = layout_from_json(j.at("out_layout"));
  std::vector<ComplexMatrix> kraus;
  for (const Json& k : j.at("kraus")) kraus.push_back(matrix_from_json(k));
  return Channel(std::move(in), std::move(out), std::move(kraus));
}

void save_json(const Json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open '" + path + "' for writing");
  f << j.dump(2) << "\n";
}

Json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open '" + path + "'");
  Json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw ParseError("invalid JSON in '" + path + "': " + e.what());
  }
  return j;
}

DensityMatrix load_state_json(const std::string& path) {
  return state_from_json(load_json(path));
}

void save_state_json(const DensityMatrix& rho, const std::string& path) {
  save_json(state_to_json(rho), path);
}

}  // namespace qcorr
