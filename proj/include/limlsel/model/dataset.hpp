#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace limlsel::model {

enum class TreatmentKind { continuous, dichotomous };
enum class Variable { z, w, x1, x2, x3 };

std::string to_string(TreatmentKind kind);
std::string to_string(Variable var);
TreatmentKind parse_treatment_kind(const std::string& name);
Variable parse_variable(const std::string& name);

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Observed sample. v and u hold the latent errors when the dataset came
// from the generator with latents retained; they are empty otherwise.
struct Dataset {
  TreatmentKind kind = TreatmentKind::continuous;
  std::vector<double> y, w, x1, x2, x3, z;
  std::vector<double> v, u;

  std::size_t size() const { return y.size(); }
  bool has_latents() const { return !v.empty(); }
  const std::vector<double>& column(Variable var) const;

  // Throws DataError on mismatched lengths, non-binary y, or non-binary w for
  // a dichotomous treatment.
  void validate() const;

  Dataset subset(const std::vector<std::size_t>& rows) const;
};

// CSV with header y,w,x1,x2,x3,z (any column order; v,u optional). When kind
// is not given it is inferred: dichotomous iff every w is 0 or 1.
Dataset read_csv(std::istream& in, std::optional<TreatmentKind> kind = std::nullopt);
Dataset read_csv_file(const std::string& path, std::optional<TreatmentKind> kind = std::nullopt);

// Shortest round-trip decimal formatting. Latent columns are written only
// when requested and present.
void write_csv(std::ostream& out, const Dataset& data, bool with_latents = false);
void write_csv_file(const std::string& path, const Dataset& data, bool with_latents = false);

std::string format_double(double x);

}  // namespace limlsel::model
