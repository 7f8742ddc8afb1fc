#ifndef ASDLAB_FIELDFILE_HPP
#define ASDLAB_FIELDFILE_HPP

#include <string>

#include "asdlab/field.hpp"

namespace asdlab {

// Binary field container.
//   magic "ASDF1"
//   header: r, L (f64); n_eta, n_xi1, n_xi2, n_t, mode, degree, ncomp (i32)
//   payload: little-endian f64, site-major, component-minor
//   trailer: CRC32 over header + payload
void write_field_file(const std::string& path, const Field& f);

struct FieldFileData {
  GridSpec spec;
  FormKind kind;
  std::vector<double> payload;
};
FieldFileData read_field_file(const std::string& path);  // throws corrupt_data_error

Field attach(const FieldFileData& data, const Grid& g);

struct corrupt_data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace asdlab

#endif
