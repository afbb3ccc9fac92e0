#include "zolab/image.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

#include "zolab/error.hpp"
#include "zolab/rng.hpp"

namespace zolab {

namespace {

constexpr double kSparseCutoff = 1.0 / 16.0;

std::size_t word_count(int n) {
  const auto cells = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
  return static_cast<std::size_t>((cells + 63) / 64);
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "probability must lie in [0,1]");
  }
}

// Exactly `count` distinct pixels set to black, uniformly (Floyd's algorithm).
void place_uniform(Image& img, std::int64_t count, Engine& engine) {
  const std::int64_t cells = img.cells();
  for (std::int64_t j = cells - count; j < cells; ++j) {
    std::uniform_int_distribution<std::int64_t> pick(0, j);
    const std::int64_t t = pick(engine);
    img.set(img.get(t) ? j : t, true);
  }
}

Image sample_sparse(int n, double p, Engine& engine) {
  Image img(n);
  std::binomial_distribution<std::int64_t> count(img.cells(), p);
  place_uniform(img, count(engine), engine);
  return img;
}

Image sample_dense(int n, double p, Engine& engine) {
  Image img(n);
  std::bernoulli_distribution coin(p);
  for (std::int64_t i = 0; i < img.cells(); ++i) {
    if (coin(engine)) img.set(i, true);
  }
  return img;
}

}  // namespace

Image::Image(int n) : n_(n) {
  if (n < 1) {
    throw Error(ErrorCode::InvalidArgument, "side length must be >= 1");
  }
  words_.assign(word_count(n), 0);
}

Image Image::filled(int n, bool black) {
  Image img(n);
  if (black) {
    for (std::int64_t i = 0; i < img.cells(); ++i) img.set(i, true);
  }
  return img;
}

Image Image::from_mask(int n, std::uint64_t mask) {
  Image img(n);
  if (img.cells() > 64) {
    throw Error(ErrorCode::InvalidArgument, "from_mask needs n*n <= 64");
  }
  if (img.cells() < 64) mask &= (std::uint64_t{1} << img.cells()) - 1;
  img.words_[0] = mask;
  return img;
}

std::int64_t Image::black_count() const noexcept {
  std::int64_t total = 0;
  for (auto w : words_) total += std::popcount(w);
  return total;
}

std::vector<std::int64_t> Image::black_indices() const {
  std::vector<std::int64_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      out.push_back(static_cast<std::int64_t>(w * 64) + std::countr_zero(bits));
      bits &= bits - 1;
    }
  }
  return out;
}

std::uint64_t Image::ball_code(Pixel center, int r) const noexcept {
  std::uint64_t code = 0;
  int bit = 0;
  for (int dr = -r; dr <= r; ++dr) {
    int row = (center.row + dr) % n_;
    if (row < 0) row += n_;
    const std::int64_t base = std::int64_t{row} * n_;
    for (int dc = -r; dc <= r; ++dc, ++bit) {
      int col = (center.col + dc) % n_;
      if (col < 0) col += n_;
      if (get(base + col)) code |= std::uint64_t{1} << bit;
    }
  }
  return code;
}

Image sample(const SampleSpec& spec, SamplingPath path) {
  check_probability(spec.p);
  Engine engine = make_engine(spec.seed);
  if (spec.p == 0.0) return Image(spec.n);
  if (spec.p == 1.0) return Image::filled(spec.n, true);

  switch (path) {
    case SamplingPath::Dense:
      return sample_dense(spec.n, spec.p, engine);
    case SamplingPath::Sparse:
      return sample_sparse(spec.n, spec.p, engine);
    case SamplingPath::Auto:
      break;
  }
  if (spec.p <= kSparseCutoff) return sample_sparse(spec.n, spec.p, engine);
  if (spec.p >= 1.0 - kSparseCutoff) return complement(sample_sparse(spec.n, 1.0 - spec.p, engine));
  return sample_dense(spec.n, spec.p, engine);
}

Image complement(const Image& img) {
  Image out = img;
  for (auto& w : out.words_) w = ~w;
  const std::int64_t tail = img.cells() % 64;
  if (tail != 0) out.words_.back() &= (std::uint64_t{1} << tail) - 1;
  return out;
}

double parity_probability(int n, double p) {
  check_probability(p);
  const double cells = static_cast<double>(n) * n;
  return 0.5 * (1.0 + std::pow(1.0 - 2.0 * p, cells));
}

namespace {

class PbmLexer {
 public:
  explicit PbmLexer(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view word() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '#') {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  int positive_int() {
    const auto w = word();
    if (w.empty() || w.size() > 9) throw Error(ErrorCode::MalformedPBM, "expected image dimension");
    int value = 0;
    for (char c : w) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw Error(ErrorCode::MalformedPBM, "bad dimension '" + std::string(w) + "'");
      }
      value = value * 10 + (c - '0');
    }
    if (value < 1) throw Error(ErrorCode::MalformedPBM, "dimension must be positive");
    return value;
  }

  // P1 raster digits need not be whitespace separated.
  bool bit() {
    skip_space();
    if (pos_ >= text_.size()) throw Error(ErrorCode::MalformedPBM, "truncated raster");
    const char c = text_[pos_++];
    if (c != '0' && c != '1') {
      throw Error(ErrorCode::MalformedPBM, std::string("unexpected raster character '") + c + "'");
    }
    return c == '1';
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Image read_pbm(std::string_view text) {
  PbmLexer lex(text);
  if (lex.word() != "P1") throw Error(ErrorCode::MalformedPBM, "missing P1 magic number");
  const int width = lex.positive_int();
  const int height = lex.positive_int();
  if (width != height) {
    throw Error(ErrorCode::NonSquare, "image is " + std::to_string(width) + "x" +
                                          std::to_string(height) + ", expected square");
  }
  Image img(width);
  for (std::int64_t i = 0; i < img.cells(); ++i) img.set(i, lex.bit());
  if (!lex.at_end()) throw Error(ErrorCode::MalformedPBM, "trailing data after raster");
  return img;
}

std::string write_pbm(const Image& img) {
  std::ostringstream out;
  out << "P1\n" << img.n() << ' ' << img.n() << '\n';
  for (int row = 0; row < img.n(); ++row) {
    for (int col = 0; col < img.n(); ++col) {
      if (col != 0) out << ' ';
      out << (img.get(Pixel{row, col}) ? '1' : '0');
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace zolab
