#include "zolab/local.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

#include "zolab/error.hpp"
#include "zolab/parallel.hpp"

namespace zolab {

namespace {

void check_radius(int r) {
  if (r < 0 || r > kMaxDescriptionRadius) {
    throw Error(ErrorCode::RadiusTooLarge,
                "description radius must lie in [0," + std::to_string(kMaxDescriptionRadius) +
                    "], got " + std::to_string(r));
  }
}

std::uint64_t cell_mask(int r) {
  const int cells = ball_cells(r);
  return cells == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << cells) - 1;
}

void check_matchable(const Image& img, int r) {
  if (img.n() < 2 * r + 2) {
    throw Error(ErrorCode::ImageTooSmall, "matching radius-" + std::to_string(r) +
                                              " balls needs n >= " + std::to_string(2 * r + 2) +
                                              ", got n=" + std::to_string(img.n()));
  }
}

}  // namespace

double description_probability(int black, int white, double p) {
  if (black > 0 && p == 0.0) return 0.0;
  if (white > 0 && p == 1.0) return 0.0;
  double log_prob = 0.0;
  if (black > 0) log_prob += black * std::log(p);
  if (white > 0) log_prob += white * std::log1p(-p);
  return std::exp(log_prob);
}

// ---------------------------------------------------------------------------
// Description

Description::Description(int r, std::uint64_t code) : r_(r), code_(code) {
  check_radius(r);
  if ((code & ~cell_mask(r)) != 0) {
    throw Error(ErrorCode::InvalidArgument, "description code has bits outside the ball");
  }
}

Description Description::from_rows(std::span<const std::string> rows) {
  const int side = static_cast<int>(rows.size());
  if (side % 2 == 0) throw Error(ErrorCode::InvalidArgument, "description side must be odd");
  std::uint64_t code = 0;
  for (int row = 0; row < side; ++row) {
    if (static_cast<int>(rows[row].size()) != side) {
      throw Error(ErrorCode::InvalidArgument, "description rows must form a square");
    }
    for (int col = 0; col < side; ++col) {
      const char c = rows[row][col];
      if (c != '0' && c != '1') throw Error(ErrorCode::InvalidArgument, "description cells are 0/1");
      if (c == '1') code |= std::uint64_t{1} << (row * side + col);
    }
  }
  return Description((side - 1) / 2, code);
}

int Description::black_count() const noexcept { return std::popcount(code_); }

Description Description::complement() const { return Description(r_, ~code_ & cell_mask(r_)); }

Description all_white(int r) { return Description(r, 0); }

Description center_black(int r) {
  return Description(r, std::uint64_t{1} << (ball_cells(r) / 2));
}

std::string write_description(const Description& d) {
  std::string out = "P1\n# radius " + std::to_string(d.radius()) + "\n";
  out += std::to_string(d.side()) + " " + std::to_string(d.side()) + "\n";
  for (int row = 0; row < d.side(); ++row) {
    for (int col = 0; col < d.side(); ++col) {
      if (col != 0) out += ' ';
      out += d.cell(row, col) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

Description read_description(std::string_view text) {
  const Image img = read_pbm(text);
  if (img.n() % 2 == 0) throw Error(ErrorCode::MalformedPBM, "description side must be odd");
  const int r = (img.n() - 1) / 2;
  check_radius(r);
  const auto tag = text.find("# radius ");
  if (tag != std::string_view::npos) {
    int declared = 0;
    std::size_t i = tag + 9;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') declared = declared * 10 + (text[i++] - '0');
    if (declared != r) {
      throw Error(ErrorCode::MalformedPBM, "radius comment disagrees with template size");
    }
  }
  std::uint64_t code = 0;
  for (std::int64_t i = 0; i < img.cells(); ++i) {
    if (img.get(i)) code |= std::uint64_t{1} << i;
  }
  return Description(r, code);
}

// ---------------------------------------------------------------------------
// DescriptionSet

DescriptionSet::DescriptionSet(int r) : r_(r) {
  check_radius(r);
  by_black_.assign(static_cast<std::size_t>(ball_cells(r) + 1), 0);
  if (dense()) bitmap_.assign(((std::uint64_t{1} << ball_cells(r)) + 63) / 64, 0);
}

DescriptionSet DescriptionSet::from_bitmap(int r, std::vector<std::uint64_t> bitmap) {
  DescriptionSet set(r);
  if (!set.dense() || bitmap.size() != set.bitmap_.size()) {
    throw Error(ErrorCode::InvalidArgument, "bitmap does not match the ball size");
  }
  const int cells = ball_cells(r);
  if (cells < 6) bitmap[0] &= (std::uint64_t{1} << (std::uint64_t{1} << cells)) - 1;
  set.bitmap_ = std::move(bitmap);
  for (std::size_t w = 0; w < set.bitmap_.size(); ++w) {
    std::uint64_t bits = set.bitmap_[w];
    while (bits != 0) {
      const std::uint64_t code = w * 64 + static_cast<std::uint64_t>(std::countr_zero(bits));
      ++set.by_black_[static_cast<std::size_t>(std::popcount(code))];
      ++set.size_;
      bits &= bits - 1;
    }
  }
  return set;
}

void DescriptionSet::insert(const Description& d) {
  if (d.radius() != r_) throw Error(ErrorCode::InvalidArgument, "description radius mismatch");
  if (contains(d.code())) return;
  if (dense()) {
    bitmap_[d.code() >> 6] |= std::uint64_t{1} << (d.code() & 63);
  } else {
    sparse_.insert(std::lower_bound(sparse_.begin(), sparse_.end(), d.code()), d.code());
  }
  ++by_black_[static_cast<std::size_t>(d.black_count())];
  ++size_;
}

bool DescriptionSet::contains(std::uint64_t code) const noexcept {
  if (dense()) {
    const std::size_t w = code >> 6;
    return w < bitmap_.size() && ((bitmap_[w] >> (code & 63)) & 1U);
  }
  return std::binary_search(sparse_.begin(), sparse_.end(), code);
}

std::optional<int> DescriptionSet::min_black() const noexcept {
  for (std::size_t k = 0; k < by_black_.size(); ++k) {
    if (by_black_[k] != 0) return static_cast<int>(k);
  }
  return std::nullopt;
}

std::optional<int> DescriptionSet::min_white() const noexcept {
  for (std::size_t k = by_black_.size(); k-- > 0;) {
    if (by_black_[k] != 0) return static_cast<int>(by_black_.size() - 1 - k);
  }
  return std::nullopt;
}

std::optional<Description> DescriptionSet::first_minimal() const {
  const auto k = min_black();
  if (!k) return std::nullopt;
  for (const auto& d : members()) {
    if (d.black_count() == *k) return d;
  }
  return std::nullopt;
}

std::vector<Description> DescriptionSet::members() const {
  std::vector<Description> out;
  out.reserve(size_);
  if (!dense()) {
    for (auto code : sparse_) out.emplace_back(r_, code);
    return out;
  }
  for (std::size_t w = 0; w < bitmap_.size(); ++w) {
    std::uint64_t bits = bitmap_[w];
    while (bits != 0) {
      out.emplace_back(r_, w * 64 + static_cast<std::uint64_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

DescriptionSet DescriptionSet::complement() const {
  DescriptionSet out(r_);
  for (const auto& d : members()) out.insert(d.complement());
  return out;
}

FactoredPattern PatternSentence::factored() const {
  FactoredPattern fp{r, {}};
  for (const auto& d : slots) {
    if (d.radius() != r) throw Error(ErrorCode::InvalidArgument, "pattern slots must share radius");
    DescriptionSet set(r);
    set.insert(d);
    fp.slots.push_back(std::move(set));
  }
  return fp;
}

void validate(const BasicLocalSentence& sentence) {
  if (sentence.r < 0) throw Error(ErrorCode::InvalidArgument, "negative radius");
  if (sentence.psis.empty()) throw Error(ErrorCode::InvalidArgument, "basic local sentence needs m >= 1");
  for (const auto& psi : sentence.psis) {
    const auto free = free_variables(psi);
    if (free.size() > 1) {
      throw Error(ErrorCode::InvalidArgument,
                  "local formula '" + to_string(psi) + "' has more than one free variable");
    }
    check_well_formed(psi, free);
  }
}

// ---------------------------------------------------------------------------
// Matching

bool match_description(const Image& img, const Description& d, Pixel center) {
  check_matchable(img, d.radius());
  return img.ball_code(center, d.radius()) == d.code();
}

namespace {

// Centers whose radius-r ball is in `slot`, ascending by index.
std::vector<std::int64_t> slot_candidates(const Image& img, const DescriptionSet& slot,
                                          const std::vector<std::int64_t>& black) {
  const int r = slot.radius();
  const int n = img.n();
  const TorusGeometry geom(n);
  std::vector<std::int64_t> out;
  auto test = [&](std::int64_t idx) {
    if (slot.contains(img.ball_code(geom.pixel(idx), r))) out.push_back(idx);
  };

  const auto k_min = slot.min_black();
  if (!k_min) return out;
  const auto cells = static_cast<std::uint64_t>(ball_cells(r));
  // Every member has a black pixel: only centers near black pixels qualify.
  if (*k_min >= 1 && black.size() * cells < static_cast<std::uint64_t>(img.cells())) {
    std::vector<std::int64_t> near;
    near.reserve(black.size() * cells);
    for (std::int64_t b : black) {
      const Pixel x = geom.pixel(b);
      for (int dr = -r; dr <= r; ++dr) {
        for (int dc = -r; dc <= r; ++dc) near.push_back(geom.index(geom.wrap_add(x, {dr, dc})));
      }
    }
    std::sort(near.begin(), near.end());
    near.erase(std::unique(near.begin(), near.end()), near.end());
    for (std::int64_t idx : near) test(idx);
    return out;
  }
  for (std::int64_t idx = 0; idx < img.cells(); ++idx) test(idx);
  return out;
}

bool place(const std::vector<std::vector<std::int64_t>>& candidates,
           const std::vector<std::size_t>& order, std::size_t depth, int r,
           const TorusGeometry& geom, std::vector<std::int64_t>& chosen) {
  if (depth == order.size()) return true;
  for (std::int64_t c : candidates[order[depth]]) {
    const Pixel x = geom.pixel(c);
    bool separated = true;
    for (std::size_t d = 0; d < depth; ++d) {
      if (geom.distance(x, geom.pixel(chosen[order[d]])) <= 2 * r) {
        separated = false;
        break;
      }
    }
    if (!separated) continue;
    chosen[order[depth]] = c;
    if (place(candidates, order, depth + 1, r, geom, chosen)) return true;
  }
  return false;
}

}  // namespace

std::optional<std::vector<Pixel>> find_witness(const Image& img, const FactoredPattern& fp) {
  check_matchable(img, fp.r);
  for (const auto& slot : fp.slots) {
    if (slot.radius() != fp.r) throw Error(ErrorCode::InvalidArgument, "slot radius mismatch");
    if (slot.empty()) return std::nullopt;
  }
  const std::vector<std::int64_t> black = img.black_indices();
  std::vector<std::vector<std::int64_t>> candidates;
  candidates.reserve(fp.slots.size());
  for (const auto& slot : fp.slots) {
    candidates.push_back(slot_candidates(img, slot, black));
    if (candidates.back().empty()) return std::nullopt;
  }

  std::vector<std::size_t> order(fp.slots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return candidates[a].size() < candidates[b].size();
  });

  const TorusGeometry geom(img.n());
  std::vector<std::int64_t> chosen(fp.slots.size(), -1);
  if (!place(candidates, order, 0, fp.r, geom, chosen)) return std::nullopt;
  std::vector<Pixel> centers;
  for (std::int64_t c : chosen) centers.push_back(geom.pixel(c));
  return centers;
}

bool match_factored(const Image& img, const FactoredPattern& fp) {
  return find_witness(img, fp).has_value();
}

// ---------------------------------------------------------------------------
// Decomposition

DescriptionSet descriptions_implying(const Formula& psi, int r, const LocalOptions& options) {
  if (r < 0) throw Error(ErrorCode::InvalidArgument, "negative radius");
  if (r > options.max_radius || r > kMaxEnumerationRadius) {
    throw Error(ErrorCode::RadiusTooLarge,
                "enumerating radius-" + std::to_string(r) + " balls exceeds the cap of r <= " +
                    std::to_string(std::min(options.max_radius, kMaxEnumerationRadius)));
  }
  const auto free = free_variables(psi);
  if (free.size() > 1) {
    throw Error(ErrorCode::InvalidArgument, "local formula must have at most one free variable");
  }
  check_well_formed(psi, free);

  const CompiledFormula compiled(psi);
  const int side = ball_side(r);
  const int center = ball_cells(r) / 2;
  std::vector<int> free_values;
  if (!free.empty()) free_values.push_back(center);

  const std::uint64_t colorings = std::uint64_t{1} << ball_cells(r);
  std::vector<std::uint64_t> bitmap((colorings + 63) / 64, 0);
  // One chunk per group of bitmap words, so threads never share a word.
  const std::uint64_t words = bitmap.size();
  parallel_chunks(words, std::min<std::uint64_t>(words, 256), options.workers,
                  [&](std::size_t, std::uint64_t begin, std::uint64_t end) {
                    for (std::uint64_t w = begin; w < end; ++w) {
                      std::uint64_t bits = 0;
                      const std::uint64_t last = std::min<std::uint64_t>(64, colorings - w * 64);
                      for (std::uint64_t b = 0; b < last; ++b) {
                        if (compiled.evaluate_plain(side, w * 64 + b, free_values, options.eval)) {
                          bits |= std::uint64_t{1} << b;
                        }
                      }
                      bitmap[w] = bits;
                    }
                  });
  return DescriptionSet::from_bitmap(r, std::move(bitmap));
}

FactoredPattern factor(const BasicLocalSentence& sentence, const LocalOptions& options) {
  validate(sentence);
  FactoredPattern fp{sentence.r, {}};
  for (const auto& psi : sentence.psis) {
    fp.slots.push_back(descriptions_implying(psi, sentence.r, options));
  }
  return fp;
}

SentenceIndex index(const FactoredPattern& fp) {
  int k = 0;
  for (const auto& slot : fp.slots) {
    const auto k_min = slot.min_black();
    if (!k_min) return SentenceIndex::infinity();
    k = std::max(k, *k_min);
  }
  return SentenceIndex::finite(k);
}

SentenceIndex index(const BasicLocalSentence& sentence, const LocalOptions& options) {
  return index(factor(sentence, options));
}

// ---------------------------------------------------------------------------
// Inline templates

RectTemplate::RectTemplate(int r, int height, int width, std::vector<std::uint8_t> cells)
    : r_(r), height_(height), width_(width), cells_(std::move(cells)) {
  if (height <= 0 || width <= 0 || cells_.size() != static_cast<std::size_t>(height * width)) {
    throw Error(ErrorCode::InvalidArgument, "template cells do not match its shape");
  }
  for (auto c : cells_) black_ += c != 0 ? 1 : 0;
}

void RectTemplate::check_fits(const Image& img) const {
  if (img.n() < width_ || img.n() < height_) {
    throw Error(ErrorCode::ImageTooSmall, "template of width " + std::to_string(width_) +
                                              " does not fit an image of side " +
                                              std::to_string(img.n()));
  }
}

bool RectTemplate::matches_at(const Image& img, Pixel anchor) const {
  check_fits(img);
  const TorusGeometry geom(img.n());
  for (int a = 0; a < height_; ++a) {
    for (int b = 0; b < width_; ++b) {
      if (img.get(geom.wrap_add(anchor, {a - r_, b - r_})) != cell(a, b)) return false;
    }
  }
  return true;
}

bool RectTemplate::occurs(const Image& img) const {
  check_fits(img);
  for (int row = 0; row < img.n(); ++row) {
    for (int col = 0; col < img.n(); ++col) {
      if (matches_at(img, {row, col})) return true;
    }
  }
  return false;
}

RectTemplate concat_horizontal(std::span<const Description> descs) {
  if (descs.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one description");
  const int r = descs.front().radius();
  const int side = ball_side(r);
  const int width = side * static_cast<int>(descs.size());
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(side * width), 0);
  for (std::size_t i = 0; i < descs.size(); ++i) {
    if (descs[i].radius() != r) throw Error(ErrorCode::InvalidArgument, "descriptions must share radius");
    for (int a = 0; a < side; ++a) {
      for (int b = 0; b < side; ++b) {
        cells[static_cast<std::size_t>(a * width + static_cast<int>(i) * side + b)] =
            descs[i].cell(a, b) ? 1 : 0;
      }
    }
  }
  return RectTemplate(r, side, width, std::move(cells));
}

// ---------------------------------------------------------------------------
// Conversions

Formula to_sentence(const BasicLocalSentence& sentence) {
  validate(sentence);
  std::set<std::string> taken;
  for (const auto& psi : sentence.psis) taken.merge(all_variables(psi));
  std::vector<std::string> centers;
  for (std::size_t i = 0; i < sentence.psis.size(); ++i) {
    std::string name = "x" + std::to_string(i + 1);
    while (taken.contains(name)) name += "_";
    taken.insert(name);
    centers.push_back(name);
  }

  std::optional<Formula> body;
  auto add = [&](Formula f) { body = body ? fo::conj(std::move(*body), std::move(f)) : std::move(f); };
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      add(fo::dist_gt(centers[i], centers[j], 2 * sentence.r));
    }
  }
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const Formula& psi = sentence.psis[i];
    const auto free = free_variables(psi);
    if (free.empty()) {
      add(relativize(psi, centers[i], sentence.r));
    } else {
      const std::string& v = *free.begin();
      add(rename_free(relativize(psi, v, sentence.r), v, centers[i]));
    }
  }
  Formula out = std::move(*body);
  for (std::size_t i = centers.size(); i-- > 0;) out = fo::exists(centers[i], std::move(out));
  return out;
}

BasicLocalSentence color_swap(const BasicLocalSentence& sentence) {
  BasicLocalSentence out{sentence.r, {}};
  for (const auto& psi : sentence.psis) out.psis.push_back(color_swap(psi));
  return out;
}

FactoredPattern color_swap(const FactoredPattern& fp) {
  FactoredPattern out{fp.r, {}};
  for (const auto& slot : fp.slots) out.slots.push_back(slot.complement());
  return out;
}

using nlohmann::json;

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

BasicLocalSentence parse_local_sentence(std::string_view json_text) {
  const json doc = parse_json(json_text);
  try {
    BasicLocalSentence sentence;
    sentence.r = doc.at("r").get<int>();
    for (const auto& text : doc.at("psis")) sentence.psis.push_back(parse(text.get<std::string>()));
    validate(sentence);
    return sentence;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("bad local sentence: ") + e.what());
  }
}

std::string write_local_sentence(const BasicLocalSentence& sentence) {
  json doc;
  doc["r"] = sentence.r;
  doc["psis"] = json::array();
  for (const auto& psi : sentence.psis) doc["psis"].push_back(to_string(psi));
  return doc.dump(2) + "\n";
}

FactoredPattern parse_factored_pattern(std::string_view json_text) {
  const json doc = parse_json(json_text);
  try {
    FactoredPattern fp;
    fp.r = doc.at("r").get<int>();
    std::map<std::string, Description> templates;
    for (const auto& [id, pbm] : doc.at("templates").items()) {
      Description d = read_description(pbm.get<std::string>());
      if (d.radius() != fp.r) {
        throw Error(ErrorCode::MalformedDocument, "template '" + id + "' has the wrong radius");
      }
      templates.emplace(id, d);
    }
    for (const auto& slot : doc.at("slots")) {
      DescriptionSet set(fp.r);
      for (const auto& id : slot) {
        auto it = templates.find(id.get<std::string>());
        if (it == templates.end()) {
          throw Error(ErrorCode::MalformedDocument, "unknown template id '" + id.get<std::string>() + "'");
        }
        set.insert(it->second);
      }
      fp.slots.push_back(std::move(set));
    }
    if (fp.slots.empty()) throw Error(ErrorCode::MalformedDocument, "pattern needs at least one slot");
    return fp;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("bad factored pattern: ") + e.what());
  }
}

std::string write_factored_pattern(const FactoredPattern& fp) {
  std::map<std::uint64_t, std::string> ids;
  for (const auto& slot : fp.slots) {
    for (const auto& d : slot.members()) ids.emplace(d.code(), "");
  }
  std::size_t next = 0;
  for (auto& [code, id] : ids) id = "t" + std::to_string(next++);

  json doc;
  doc["r"] = fp.r;
  doc["templates"] = json::object();
  for (const auto& [code, id] : ids) doc["templates"][id] = write_description(Description(fp.r, code));
  doc["slots"] = json::array();
  for (const auto& slot : fp.slots) {
    json ids_in_slot = json::array();
    for (const auto& d : slot.members()) ids_in_slot.push_back(ids.at(d.code()));
    doc["slots"].push_back(std::move(ids_in_slot));
  }
  return doc.dump(2) + "\n";
}

}  // namespace zolab
