#include "cgmom/instance_io.hpp"

#include <json.hpp>

#include <fstream>

namespace cgmom {

namespace {

using nlohmann::json;

const char* family_name(ProblemFamily f) {
  switch (f) {
    case ProblemFamily::QuadLaplacian: return "quad-laplacian";
    case ProblemFamily::SparseRandom: return "sparse-random";
    case ProblemFamily::SparseConstructed: return "sparse-constructed";
  }
  return "?";
}

ProblemFamily parse_family(const std::string& s) {
  if (s == "quad-laplacian") return ProblemFamily::QuadLaplacian;
  if (s == "sparse-random") return ProblemFamily::SparseRandom;
  if (s == "sparse-constructed") return ProblemFamily::SparseConstructed;
  throw std::runtime_error("unknown problem family '" + s + "'");
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vector vector_from_json(const json& arr) {
  Vector v(static_cast<Index>(arr.size()));
  Index i = 0;
  for (const auto& x : arr) v(i++) = x.get<double>();
  return v;
}

}  // namespace

std::string instance_to_json_text(const SparseInstance& inst) {
  json doc;
  doc["family"] = family_name(inst.recipe.family);
  doc["dims"] = {inst.A.rows(), inst.A.cols()};
  doc["seed"] = inst.recipe.seed;
  doc["lambda"] = inst.recipe.lambda;
  doc["reg"] = inst.recipe.reg == RegularizerKind::L1 ? "l1" : "l12";
  json mat = json::array();
  for (Index i = 0; i < inst.A.rows(); ++i)
    for (Index j = 0; j < inst.A.cols(); ++j) mat.push_back(inst.A(i, j));
  doc["matrix"] = std::move(mat);
  doc["b"] = vector_to_json(inst.b);
  doc["x_star"] = vector_to_json(inst.x_star);
  return doc.dump();
}

SparseInstance instance_from_json_text(const std::string& text) {
  const json doc = json::parse(text);
  SparseInstance inst;
  inst.recipe.family = parse_family(doc.at("family").get<std::string>());
  const Index rows = doc.at("dims").at(0).get<Index>();
  const Index cols = doc.at("dims").at(1).get<Index>();
  inst.recipe.rows = rows;
  inst.recipe.cols = cols;
  inst.recipe.seed = doc.at("seed").get<std::uint64_t>();
  inst.recipe.lambda = doc.at("lambda").get<double>();
  const std::string reg = doc.at("reg").get<std::string>();
  if (reg != "l1" && reg != "l12") throw std::runtime_error("unknown regularizer '" + reg + "'");
  inst.recipe.reg = reg == "l1" ? RegularizerKind::L1 : RegularizerKind::L1MinusL2;

  const json& mat = doc.at("matrix");
  if (static_cast<Index>(mat.size()) != rows * cols) {
    throw std::runtime_error("matrix entry count does not match dims");
  }
  inst.A.resize(rows, cols);
  Index k = 0;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) inst.A(i, j) = mat.at(k++).get<double>();
  inst.b = vector_from_json(doc.at("b"));
  inst.x_star = vector_from_json(doc.at("x_star"));
  inst.recipe.sparsity = std::max<Index>(1, (inst.x_star.array() != 0.0).count());
  inst.effective_seed = inst.recipe.seed;
  return inst;
}

void save_instance(const SparseInstance& inst, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << instance_to_json_text(inst) << '\n';
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("rename to " + path.string() + " failed: " + ec.message());
}

SparseInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return instance_from_json_text(text);
}

}  // namespace cgmom
