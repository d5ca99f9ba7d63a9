#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pelletseg/classes.hpp"
#include "pelletseg/io.hpp"

namespace pelletseg::io {

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

namespace {

constexpr char kMagic[] = "\x93NUMPY";

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    s += std::to_string(shape[i]);
    if (shape.size() == 1 || i + 1 < shape.size()) s += ",";
    if (i + 1 < shape.size()) s += " ";
  }
  return s + ")";
}

// Value following `'key':` in a NPY header dict, up to the next top-level comma.
std::string dict_value(const std::string& header, const std::string& key, const fs::path& path) {
  const std::string needle = "'" + key + "'";
  auto pos = header.find(needle);
  if (pos == std::string::npos) throw FormatError(path.string() + ": NPY header lacks '" + key + "'");
  pos = header.find(':', pos + needle.size());
  if (pos == std::string::npos) throw FormatError(path.string() + ": malformed NPY header");
  ++pos;
  while (pos < header.size() && header[pos] == ' ') ++pos;
  if (pos < header.size() && header[pos] == '(') {
    const auto end = header.find(')', pos);
    if (end == std::string::npos) throw FormatError(path.string() + ": malformed NPY shape");
    return header.substr(pos, end - pos + 1);
  }
  auto end = header.find_first_of(",}", pos);
  std::string v = header.substr(pos, end - pos);
  while (!v.empty() && v.back() == ' ') v.pop_back();
  return v;
}

std::vector<std::size_t> parse_shape(const std::string& text, const fs::path& path) {
  std::vector<std::size_t> shape;
  std::string inner = text.substr(1, text.size() - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
    if (item.empty()) continue;
    try {
      shape.push_back(static_cast<std::size_t>(std::stoull(item)));
    } catch (const std::exception&) {
      throw FormatError(path.string() + ": bad NPY shape entry '" + item + "'");
    }
  }
  return shape;
}

}  // namespace

NpyArray read_npy(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string() + " for reading");
  char magic[6];
  in.read(magic, 6);
  if (!in || std::memcmp(magic, kMagic, 6) != 0) throw FormatError(path.string() + " is not a NPY file");
  unsigned char version[2];
  in.read(reinterpret_cast<char*>(version), 2);
  std::size_t header_len = 0;
  if (version[0] == 1) {
    unsigned char len[2];
    in.read(reinterpret_cast<char*>(len), 2);
    header_len = len[0] | (std::size_t(len[1]) << 8);
  } else if (version[0] == 2 || version[0] == 3) {
    unsigned char len[4];
    in.read(reinterpret_cast<char*>(len), 4);
    header_len = len[0] | (std::size_t(len[1]) << 8) | (std::size_t(len[2]) << 16) | (std::size_t(len[3]) << 24);
  } else {
    throw FormatError(path.string() + ": unsupported NPY version " + std::to_string(version[0]));
  }
  std::string header(header_len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw FormatError(path.string() + ": truncated NPY header");

  const std::string descr = dict_value(header, "descr", path);
  if (descr != "'<f4'") {
    throw FormatError(path.string() + ": expected dtype '<f4' (little-endian float32), found " + descr);
  }
  const std::string fortran = dict_value(header, "fortran_order", path);
  if (fortran != "False") {
    throw FormatError(path.string() + ": Fortran-order arrays are not supported (fortran_order=" + fortran + ")");
  }
  NpyArray arr;
  arr.shape = parse_shape(dict_value(header, "shape", path), path);
  std::size_t count = 1;
  for (std::size_t d : arr.shape) count *= d;
  arr.data.resize(count);
  in.read(reinterpret_cast<char*>(arr.data.data()), static_cast<std::streamsize>(count * sizeof(float)));
  if (!in) throw FormatError(path.string() + ": truncated NPY payload, expected " + std::to_string(count) + " floats");
  return arr;
}

void write_npy(const fs::path& path, const std::vector<std::size_t>& shape, std::span<const float> data) {
  std::size_t count = 1;
  for (std::size_t d : shape) count *= d;
  if (count != data.size()) throw FormatError("write_npy: shape does not match data size");
  std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': " + shape_string(shape) + ", }";
  // Pad so magic + version + length + header is a multiple of 64 bytes.
  const std::size_t base = 6 + 2 + 2;
  const std::size_t total = ((base + header.size() + 1 + 63) / 64) * 64;
  header.append(total - base - header.size() - 1, ' ');
  header.push_back('\n');

  std::string bytes(kMagic, 6);
  bytes.push_back('\x01');
  bytes.push_back('\x00');
  bytes.push_back(static_cast<char>(header.size() & 0xFF));
  bytes.push_back(static_cast<char>((header.size() >> 8) & 0xFF));
  bytes += header;
  bytes.append(reinterpret_cast<const char*>(data.data()), data.size() * sizeof(float));
  write_text_atomic(path, bytes);
}

namespace {

void expect_shape(const NpyArray& arr, const std::vector<std::size_t>& want, const fs::path& path) {
  if (arr.shape != want) {
    throw FormatError(path.string() + ": expected shape " + shape_string(want) + ", found " +
                      shape_string(arr.shape));
  }
}

Grid<float> to_grid(NpyArray&& arr, int rows, int cols, int channels) {
  Grid<float> g(rows, cols, channels);
  g.storage() = std::move(arr.data);
  return g;
}

}  // namespace

PredictionMaps read_maps(const fs::path& dir, std::optional<int> expected_rays) {
  std::ifstream side(dir / "maps.txt");
  if (!side) throw FormatError("missing sidecar " + (dir / "maps.txt").string());
  int n_rays = -1, n_classes = -1;
  std::string line;
  while (std::getline(side, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "n_rays") n_rays = std::stoi(value);
      if (key == "n_classes") n_classes = std::stoi(value);
    } catch (const std::exception&) {
      throw FormatError((dir / "maps.txt").string() + ": bad value for " + key);
    }
  }
  if (n_rays < 1 || n_classes < 1) throw FormatError((dir / "maps.txt").string() + ": n_rays and n_classes required");
  if (expected_rays && *expected_rays != n_rays) {
    throw FormatError("maps in " + dir.string() + " carry n_rays=" + std::to_string(n_rays) +
                      " but the configuration expects n_rays=" + std::to_string(*expected_rays));
  }

  NpyArray prob = read_npy(dir / "prob.npy");
  if (prob.shape.size() != 2) {
    throw FormatError((dir / "prob.npy").string() + ": expected shape (H, W), found " + shape_string(prob.shape));
  }
  const std::size_t h = prob.shape[0], w = prob.shape[1];
  NpyArray dist = read_npy(dir / "dist.npy");
  expect_shape(dist, {h, w, std::size_t(n_rays)}, dir / "dist.npy");
  NpyArray type = read_npy(dir / "type.npy");
  expect_shape(type, {h, w, std::size_t(n_classes)}, dir / "type.npy");

  const int rows = static_cast<int>(h), cols = static_cast<int>(w);
  return {to_grid(std::move(prob), rows, cols, 1), to_grid(std::move(dist), rows, cols, n_rays),
          to_grid(std::move(type), rows, cols, n_classes)};
}

void write_maps(const PredictionMaps& maps, const fs::path& dir) {
  if (maps.prob.channels() != 1 || !maps.prob.same_extent(maps.dist) || !maps.prob.same_extent(maps.type_scores)) {
    throw ShapeError("write_maps: inconsistent map shapes");
  }
  fs::create_directories(dir);
  const std::size_t h = maps.rows(), w = maps.cols();
  write_npy(dir / "prob.npy", {h, w}, maps.prob.data());
  write_npy(dir / "dist.npy", {h, w, std::size_t(maps.n_rays())}, maps.dist.data());
  write_npy(dir / "type.npy", {h, w, std::size_t(maps.n_classes())}, maps.type_scores.data());

  std::string names;
  for (int k = 0; k < maps.n_classes(); ++k) {
    if (k) names += ",";
    names += k < kNumClasses ? std::string(kClassNames[k]) : "class" + std::to_string(k);
  }
  write_text_atomic(dir / "maps.txt", "n_rays=" + std::to_string(maps.n_rays()) + "\nn_classes=" +
                                          std::to_string(maps.n_classes()) + "\nclass_names=" + names + "\n");
}

}  // namespace pelletseg::io
