#include "lrr/pgm.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrr/errors.hpp"

namespace lrr {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t offset,
                             const std::string& what) {
  std::ostringstream msg;
  msg << path << ": " << what << " (byte offset " << offset << ")";
  throw IoError(msg.str());
}

class PgmReader {
 public:
  PgmReader(std::string bytes, std::string path)
      : bytes_(std::move(bytes)), path_(std::move(path)) {}

  std::size_t offset() const { return pos_; }
  bool eof() const { return pos_ >= bytes_.size(); }

  char take() {
    if (eof()) parse_fail(path_, pos_, "unexpected end of file");
    return bytes_[pos_++];
  }

  // Whitespace and '#' comments between header tokens.
  void skip_separators() {
    while (!eof()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (!eof() && bytes_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
                 c == '\f') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_int(const char* what) {
    skip_separators();
    if (eof()) parse_fail(path_, pos_, std::string("missing ") + what);
    if (bytes_[pos_] < '0' || bytes_[pos_] > '9') {
      parse_fail(path_, pos_, std::string("expected digit in ") + what);
    }
    long value = 0;
    while (!eof() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1000000000L) parse_fail(path_, pos_, std::string(what) + " overflows");
      ++pos_;
    }
    return value;
  }

  const std::string& bytes() const { return bytes_; }
  const std::string& path() const { return path_; }

 private:
  std::string bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

Matrix load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("load_pgm: cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  PgmReader reader(buffer.str(), path);

  const char magic0 = reader.take();
  const char magic1 = reader.take();
  if (magic0 != 'P' || (magic1 != '5' && magic1 != '2')) {
    parse_fail(path, 0, "unsupported magic, expected P5 or P2");
  }
  const bool binary = magic1 == '5';

  const long width = reader.read_int("width");
  const long height = reader.read_int("height");
  const long maxval = reader.read_int("maxval");
  if (width < 1 || height < 1) parse_fail(path, reader.offset(), "non-positive dimensions");
  if (maxval < 1 || maxval > 65535) parse_fail(path, reader.offset(), "maxval out of [1, 65535]");

  Matrix image(height, width);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (binary) {
    // Exactly one whitespace byte separates the header from the payload.
    const char sep = reader.take();
    if (sep != ' ' && sep != '\t' && sep != '\r' && sep != '\n') {
      parse_fail(path, reader.offset() - 1, "expected single whitespace before payload");
    }
    const int bytes_per_sample = maxval > 255 ? 2 : 1;
    const std::size_t need =
        static_cast<std::size_t>(width) * height * bytes_per_sample;
    if (reader.bytes().size() - reader.offset() < need) {
      parse_fail(path, reader.bytes().size(), "truncated pixel payload");
    }
    for (long i = 0; i < height; ++i) {
      for (long j = 0; j < width; ++j) {
        std::uint32_t sample = static_cast<unsigned char>(reader.take());
        if (bytes_per_sample == 2) {
          sample = (sample << 8) | static_cast<unsigned char>(reader.take());
        }
        if (sample > static_cast<std::uint32_t>(maxval)) {
          parse_fail(path, reader.offset() - bytes_per_sample, "sample exceeds maxval");
        }
        image(i, j) = sample * scale;
      }
    }
  } else {
    for (long i = 0; i < height; ++i) {
      for (long j = 0; j < width; ++j) {
        const long sample = reader.read_int("pixel");
        if (sample > maxval) {
          parse_fail(path, reader.offset(), "sample exceeds maxval");
        }
        image(i, j) = sample * scale;
      }
    }
  }
  return image;
}

void save_pgm(const Matrix& x, const std::string& path, int maxval) {
  if (maxval < 1 || maxval > 65535) {
    throw std::invalid_argument("save_pgm: maxval out of [1, 65535]");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("save_pgm: cannot open " + path);
  }
  out << "P5\n" << x.cols() << ' ' << x.rows() << '\n' << maxval << '\n';
  std::vector<char> payload;
  payload.reserve(static_cast<std::size_t>(x.size()) * (maxval > 255 ? 2 : 1));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double clamped = std::min(1.0, std::max(0.0, x(i, j)));
      const long sample = std::lround(clamped * maxval);  // half away from zero
      if (maxval > 255) {
        payload.push_back(static_cast<char>((sample >> 8) & 0xff));
      }
      payload.push_back(static_cast<char>(sample & 0xff));
    }
  }
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) {
    throw IoError("save_pgm: write failed on " + path);
  }
}

}  // namespace lrr
