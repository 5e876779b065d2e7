#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bowenlab/error.hpp"
#include "bowenlab/map_models.hpp"

namespace bowenlab {

namespace {

using nlohmann::json;

Matrix read_matrix(const json& j, const char* what) {
  require(j.is_array() && !j.empty(), ErrorKind::Input, std::string(what) + " must be a nonempty array of rows");
  const auto d = static_cast<int>(j.size());
  require(d <= kMaxDim, ErrorKind::Input, std::string(what) + " has more than 3 rows");
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    require(row.is_array() && static_cast<int>(row.size()) == d, ErrorKind::Input, std::string(what) + " must be square");
    for (int k = 0; k < d; ++k) {
      require(row[static_cast<std::size_t>(k)].is_number(), ErrorKind::Input, std::string(what) + " entries must be numbers");
      m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
  }
  return m;
}

Vector read_vector(const json& j, const char* what) {
  require(j.is_array() && !j.empty() && j.size() <= kMaxDim, ErrorKind::Input, std::string(what) + " must be a vector of length 1..3");
  Vector v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), ErrorKind::Input, std::string(what) + " entries must be numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

}  // namespace

ModelSpec model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Input, std::string("malformed model JSON: ") + e.what());
  }
  require(j.is_object() && j.contains("kind") && j["kind"].is_string(), ErrorKind::Input, "model JSON needs a string \"kind\"");
  const auto kind = j["kind"].get<std::string>();
  ModelSpec model = [&] {
    if (kind == "linear_toral") {
      require(j.contains("matrix"), ErrorKind::Input, "linear_toral needs \"matrix\"");
      return ModelSpec::linear_toral(read_matrix(j["matrix"], "matrix"));
    }
    if (kind == "sft_affine") {
      require(j.contains("branches") && j["branches"].is_array(), ErrorKind::Input, "sft_affine needs \"branches\"");
      std::vector<AffineBranch> branches;
      for (const auto& b : j["branches"]) {
        require(b.is_object() && b.contains("linear") && b.contains("offset"), ErrorKind::Input,
                "each branch needs \"linear\" and \"offset\"");
        branches.push_back(AffineBranch{read_matrix(b["linear"], "linear"), read_vector(b["offset"], "offset")});
      }
      std::vector<std::vector<int>> t;
      if (j.contains("transitions")) {
        require(j["transitions"].is_array(), ErrorKind::Input, "\"transitions\" must be an array of rows");
        for (const auto& row : j["transitions"]) {
          require(row.is_array(), ErrorKind::Input, "\"transitions\" must be an array of rows");
          std::vector<int> r;
          for (const auto& v : row) {
            require(v.is_number_integer(), ErrorKind::Input, "transition entries must be 0 or 1");
            r.push_back(v.get<int>());
          }
          t.push_back(std::move(r));
        }
      }
      if (j.contains("alphabet")) {
        require(j["alphabet"].is_number_integer() && j["alphabet"].get<std::size_t>() == branches.size(), ErrorKind::Input,
                "\"alphabet\" must equal the number of branches");
      }
      return ModelSpec::sft_affine(std::move(t), std::move(branches));
    }
    if (kind == "perturbed_doubling") {
      require(j.contains("epsilon") && j["epsilon"].is_number(), ErrorKind::Input, "perturbed_doubling needs \"epsilon\"");
      return ModelSpec::perturbed_doubling(j["epsilon"].get<double>());
    }
    fail(ErrorKind::Input, "unknown model kind \"" + kind + "\"");
  }();
  validate_model(model);
  return model;
}

ModelSpec load_model(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open model file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace bowenlab
