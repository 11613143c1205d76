#include "limlsel/model/dataset.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace limlsel::model {

std::string to_string(TreatmentKind kind) {
  return kind == TreatmentKind::continuous ? "continuous" : "dichotomous";
}

std::string to_string(Variable var) {
  switch (var) {
    case Variable::z: return "z";
    case Variable::w: return "w";
    case Variable::x1: return "x1";
    case Variable::x2: return "x2";
    case Variable::x3: return "x3";
  }
  return "?";
}

TreatmentKind parse_treatment_kind(const std::string& name) {
  if (name == "continuous") return TreatmentKind::continuous;
  if (name == "dichotomous" || name == "binary") return TreatmentKind::dichotomous;
  throw std::invalid_argument("unknown treatment kind '" + name + "'");
}

Variable parse_variable(const std::string& name) {
  for (Variable v : {Variable::z, Variable::w, Variable::x1, Variable::x2, Variable::x3}) {
    if (to_string(v) == name) return v;
  }
  throw std::invalid_argument("unknown variable '" + name + "'");
}

const std::vector<double>& Dataset::column(Variable var) const {
  switch (var) {
    case Variable::z: return z;
    case Variable::w: return w;
    case Variable::x1: return x1;
    case Variable::x2: return x2;
    case Variable::x3: return x3;
  }
  throw std::logic_error("unknown variable");
}

void Dataset::validate() const {
  const std::size_t n = y.size();
  for (Variable v : {Variable::z, Variable::w, Variable::x1, Variable::x2, Variable::x3}) {
    if (column(v).size() != n) {
      throw DataError("column " + to_string(v) + " has " + std::to_string(column(v).size()) +
                      " rows, expected " + std::to_string(n));
    }
  }
  if (v.size() != u.size() || (!v.empty() && v.size() != n)) {
    throw DataError("latent columns v,u must both be absent or have " + std::to_string(n) + " rows");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) {
      throw DataError("y must be 0 or 1 (row " + std::to_string(i + 1) + ")");
    }
    if (kind == TreatmentKind::dichotomous && w[i] != 0.0 && w[i] != 1.0) {
      throw DataError("w must be 0 or 1 for a dichotomous treatment (row " +
                      std::to_string(i + 1) + ")");
    }
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.kind = kind;
  auto pick = [&](const std::vector<double>& src, std::vector<double>& dst) {
    if (src.empty()) return;
    dst.reserve(rows.size());
    for (std::size_t r : rows) dst.push_back(src.at(r));
  };
  pick(y, out.y);
  pick(w, out.w);
  pick(x1, out.x1);
  pick(x2, out.x2);
  pick(x3, out.x3);
  pick(z, out.z);
  pick(v, out.v);
  pick(u, out.u);
  return out;
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, std::size_t line, const std::string& name) {
  double x = 0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), x);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw DataError("line " + std::to_string(line) + ": cannot parse " + name + " value '" + cell +
                    "'");
  }
  return x;
}

}  // namespace

Dataset read_csv(std::istream& in, std::optional<TreatmentKind> kind) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty CSV input");
  const std::vector<std::string> header = split(line);
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (!index.emplace(header[j], j).second) throw DataError("duplicate column '" + header[j] + "'");
  }
  for (const char* required : {"y", "w", "x1", "x2", "x3", "z"}) {
    if (!index.count(required)) throw DataError(std::string("missing column '") + required + "'");
  }
  const bool latents = index.count("v") && index.count("u");

  Dataset d;
  struct Slot {
    const char* name;
    std::vector<double>* dst;
  };
  std::vector<Slot> slots = {{"y", &d.y},   {"w", &d.w},   {"x1", &d.x1},
                             {"x2", &d.x2}, {"x3", &d.x3}, {"z", &d.z}};
  if (latents) {
    slots.push_back({"v", &d.v});
    slots.push_back({"u", &d.u});
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(cells.size()));
    }
    for (const Slot& s : slots) s.dst->push_back(parse_cell(cells[index[s.name]], line_no, s.name));
  }

  if (kind) {
    d.kind = *kind;
  } else {
    bool binary = !d.w.empty();
    for (double x : d.w) binary = binary && (x == 0.0 || x == 1.0);
    d.kind = binary ? TreatmentKind::dichotomous : TreatmentKind::continuous;
  }
  d.validate();
  return d;
}

Dataset read_csv_file(const std::string& path, std::optional<TreatmentKind> kind) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv(in, kind);
}

void write_csv(std::ostream& out, const Dataset& data, bool with_latents) {
  const bool latents = with_latents && data.has_latents();
  out << "y,w,x1,x2,x3,z" << (latents ? ",v,u" : "") << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << format_double(data.y[i]) << ',' << format_double(data.w[i]) << ','
        << format_double(data.x1[i]) << ',' << format_double(data.x2[i]) << ','
        << format_double(data.x3[i]) << ',' << format_double(data.z[i]);
    if (latents) out << ',' << format_double(data.v[i]) << ',' << format_double(data.u[i]);
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const Dataset& data, bool with_latents) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_csv(out, data, with_latents);
  if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace limlsel::model
