#include "schuriter/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "schuriter/error.hpp"

namespace schuriter {
namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

Index index_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParseError(std::string("field '") + key +
                     "' must be a nonnegative integer");
  }
  return static_cast<Index>(v.get<long long>());
}

void write_number(std::ostream& os, double x) {
  if (!std::isfinite(x)) {
    os << "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  os << buf;
}

void write(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string end_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
        write(os, it.value(), indent, depth + 1);
      }
      os << nl << end_pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Short arrays of scalars stay on one line to keep matrices readable.
      bool flat = j.size() <= 2;
      for (const Json& v : j) flat = flat && v.is_primitive();
      if (flat) {
        os << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i > 0) os << ", ";
          write(os, j[i], indent, depth + 1);
        }
        os << ']';
        return;
      }
      os << '[' << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) os << ',' << nl;
        os << pad;
        write(os, j[i], indent, depth + 1);
      }
      os << nl << end_pad << ']';
      return;
    }
    case Json::value_t::number_float:
      write_number(os, j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace

Json matrix_to_json(const CMatrix& m) {
  Json data = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index k = 0; k < m.cols(); ++k) {
      data.push_back(Json::array({m(i, k).real(), m(i, k).imag()}));
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

CMatrix matrix_from_json(const Json& j) {
  const Index rows = index_field(j, "rows");
  const Index cols = index_field(j, "cols");
  const Json& data = field(j, "data");
  if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols) {
    throw ParseError("matrix data must hold rows * cols entries");
  }
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index k = 0; k < cols; ++k) {
      const Json& e = data[static_cast<std::size_t>(i * cols + k)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
          !e[1].is_number()) {
        throw ParseError("matrix entries must be [re, im] pairs");
      }
      m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

Json block_to_json(const BlockMatrix& t) {
  return Json{{"m", t.m()},
              {"n", t.n()},
              {"h", t.h()},
              {"k", t.k()},
              {"D", matrix_to_json(t.d())},
              {"C", matrix_to_json(t.c())},
              {"B", matrix_to_json(t.b())},
              {"A", matrix_to_json(t.a())}};
}

BlockMatrix block_from_json(const Json& j) {
  const Index m = index_field(j, "m");
  const Index n = index_field(j, "n");
  const Index h = index_field(j, "h");
  const Index k = index_field(j, "k");
  CMatrix d = matrix_from_json(field(j, "D"));
  CMatrix c = matrix_from_json(field(j, "C"));
  CMatrix b = matrix_from_json(field(j, "B"));
  CMatrix a = matrix_from_json(field(j, "A"));
  BlockMatrix t(std::move(d), std::move(c), std::move(b), std::move(a));
  if (t.m() != m || t.n() != n || t.h() != h || t.k() != k) {
    throw Error(ErrorCode::kShapeMismatch,
                "declared dimensions disagree with the blocks");
  }
  return t;
}

Json classification_to_json(const Classification& c) {
  return Json{{"passive", c.passive},
              {"isometric", c.isometric},
              {"coisometric", c.coisometric},
              {"conservative", c.conservative},
              {"controllable", c.controllable},
              {"observable", c.observable},
              {"simple", c.simple},
              {"minimal", c.minimal},
              {"subspace_cross_check", c.subspace_cross_check}};
}

Json profile_to_json(const DefectProfile& p) {
  return Json{{"delta", p.delta}, {"delta_star", p.delta_star}};
}

Json chain_to_json(const SchurChain& chain) {
  Json gammas = Json::array();
  Json dims = Json::array();
  for (const CMatrix& g : chain.params.gammas) {
    gammas.push_back(matrix_to_json(g));
    dims.push_back(Json::array({g.rows(), g.cols()}));
  }
  Json h_dims = Json::array();
  for (const Subspace& s : chain.h_chain) h_dims.push_back(s.dim());
  Json iterates = Json::array();
  for (const auto& level : chain.iterates) {
    Json row = Json::array();
    for (const DiscreteSystem& tau : level) row.push_back(block_to_json(tau.block()));
    iterates.push_back(row);
  }
  return Json{{"gammas", gammas},
              {"gamma_dims", dims},
              {"h_dims", h_dims},
              {"iterates", iterates},
              {"terminated", chain.params.terminated},
              {"termination_step",
               chain.params.terminated
                   ? Json(chain.params.gammas.size() - 1)
                   : Json(nullptr)}};
}

Json report_to_json(const ChainReport& r) {
  return Json{{"gamma_mismatch", r.gamma_mismatch},
              {"transfer_oracle", r.transfer_oracle},
              {"transfer_across_k", r.transfer_across_k},
              {"similarity", r.similarity},
              {"pure_part", r.pure_part},
              {"unitarity", r.unitarity},
              {"termination_agrees", r.termination_agrees},
              {"shapes_ok", r.shapes_ok},
              {"passed", r.passed()}};
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what());
  }
}

std::string dump_fixed(const Json& j, int indent) {
  std::ostringstream os;
  write(os, j, indent, 0);
  return os.str();
}

}  // namespace schuriter
