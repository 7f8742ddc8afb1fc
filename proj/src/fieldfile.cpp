#include "asdlab/fieldfile.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <vector>

#include "asdlab/util.hpp"

namespace asdlab {

namespace {

void put_u32(std::vector<unsigned char>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}
void put_f64(std::vector<unsigned char>& b, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}
std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}
double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

int degree_of(FormKind k) {
  switch (k) {
    case FormKind::Scalar: return 0;
    case FormKind::OneForm: return 1;
    case FormKind::TwoForm: return 2;
    default: return 3;  // self-dual stored as its own degree tag
  }
}
FormKind kind_of(int degree) {
  switch (degree) {
    case 0: return FormKind::Scalar;
    case 1: return FormKind::OneForm;
    case 2: return FormKind::TwoForm;
    case 3: return FormKind::SelfDual;
    default: throw corrupt_data_error("field file: unknown form degree");
  }
}

}  // namespace

void write_field_file(const std::string& path, const Field& f) {
  const Grid& g = *f.grid;
  std::vector<unsigned char> buf;
  buf.insert(buf.end(), {'A', 'S', 'D', 'F', '1'});
  put_f64(buf, g.spec().r);
  put_f64(buf, g.spec().L);
  put_u32(buf, g.spec().n_eta);
  put_u32(buf, g.spec().n_xi1);
  put_u32(buf, g.spec().n_xi2);
  put_u32(buf, g.spec().n_t);
  put_u32(buf, g.spec().mode == TimeMode::truncated ? 0 : 1);
  put_u32(buf, degree_of(f.kind));
  put_u32(buf, f.ncomp() * 3);
  for (double d : f.v) put_f64(buf, d);
  std::uint32_t crc = crc32(buf.data() + 5, buf.size() - 5);
  put_u32(buf, crc);
  // atomic write: temp file then rename
  std::string tmp = path + ".tmp";
  FILE* fp = std::fopen(tmp.c_str(), "wb");
  if (!fp) throw std::runtime_error("cannot open " + tmp);
  std::fwrite(buf.data(), 1, buf.size(), fp);
  std::fclose(fp);
  std::filesystem::rename(tmp, path);
}

FieldFileData read_field_file(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw std::runtime_error("cannot open " + path);
  std::fseek(fp, 0, SEEK_END);
  long size = std::ftell(fp);
  std::fseek(fp, 0, SEEK_SET);
  std::vector<unsigned char> buf(size);
  if (std::fread(buf.data(), 1, size, fp) != static_cast<std::size_t>(size)) {
    std::fclose(fp);
    throw corrupt_data_error("field file: short read");
  }
  std::fclose(fp);
  if (size < 5 + 16 + 7 * 4 + 4 || std::memcmp(buf.data(), "ASDF1", 5) != 0)
    throw corrupt_data_error("field file: bad magic");
  std::uint32_t stored = get_u32(buf.data() + size - 4);
  std::uint32_t crc = crc32(buf.data() + 5, size - 9);
  if (stored != crc) throw corrupt_data_error("field file: CRC mismatch");
  const unsigned char* p = buf.data() + 5;
  FieldFileData out;
  out.spec.r = get_f64(p);
  p += 8;
  out.spec.L = get_f64(p);
  p += 8;
  out.spec.n_eta = static_cast<int>(get_u32(p));
  p += 4;
  out.spec.n_xi1 = static_cast<int>(get_u32(p));
  p += 4;
  out.spec.n_xi2 = static_cast<int>(get_u32(p));
  p += 4;
  out.spec.n_t = static_cast<int>(get_u32(p));
  p += 4;
  out.spec.mode = get_u32(p) == 0 ? TimeMode::truncated : TimeMode::periodic;
  p += 4;
  int degree = static_cast<int>(get_u32(p));
  p += 4;
  int per_site = static_cast<int>(get_u32(p));
  p += 4;
  out.kind = kind_of(degree);
  if (per_site != ncomp_of(out.kind) * 3) throw corrupt_data_error("field file: component count mismatch");
  std::int64_t sites = static_cast<std::int64_t>(out.spec.n_eta) * out.spec.n_xi1 * out.spec.n_xi2 * out.spec.n_t;
  std::int64_t want = sites * per_site;
  std::int64_t have = (size - (p - buf.data()) - 4) / 8;
  if (want != have) throw corrupt_data_error("field file: payload length mismatch");
  out.payload.resize(want);
  for (std::int64_t i = 0; i < want; ++i) out.payload[i] = get_f64(p + 8 * i);
  return out;
}

Field attach(const FieldFileData& data, const Grid& g) {
  if (!(g.spec() == data.spec)) throw invalid_argument_error("field file: grid descriptor mismatch");
  Field f(g, data.kind);
  f.v = data.payload;
  return f;
}

}  // namespace asdlab
