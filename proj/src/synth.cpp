#include "formkie/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "formkie/errors.hpp"

namespace formkie::synth {

namespace {

using Rng = std::mt19937_64;

constexpr double kMargin = 100.0;
constexpr double kLineStep = 40.0;
constexpr double kKeyValueGap = 100.0;
constexpr double kValueHeight = 40.0;
constexpr double kColumnTail = 100.0;    // free space after a value box
constexpr double kDistractorClear = 80.0;

double uniform(Rng& rng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

template <class T, std::size_t N>
const T& choose(Rng& rng, const std::array<T, N>& pool) {
  return pool[pick(rng, N)];
}

BBox text_box(double x, double y, const std::string& text) {
  return {x, y, x + kCharWidth * static_cast<double>(text.size()), y + kTextHeight};
}

bool contains_word(const std::string& key, std::string_view word) { return key.find(word) != std::string::npos; }

std::string digits(Rng& rng, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<char>('0' + pick(rng, 10));
  return s;
}

std::string two(std::size_t v) { return v < 10 ? "0" + std::to_string(v) : std::to_string(v); }

constexpr std::array<const char*, 16> kFirst{"John", "Mary", "Ahmed", "Chen", "Olivia", "Liam", "Sofia", "Noah",
                                             "Grace", "Ivan", "Amara", "Lucas", "Priya", "Tomas", "Hannah", "Omar"};
constexpr std::array<const char*, 16> kLast{"Smith", "Okafor", "Nguyen", "Garcia", "Kowalski", "Brown", "Haddad",
                                            "Jensen", "Murphy", "Rossi", "Tanaka", "Walsh", "Patel", "Moreau",
                                            "Fischer", "Lindqvist"};
constexpr std::array<const char*, 10> kStreets{"Oak Street", "Mill Road", "High Street", "Park Lane", "Church Road",
                                               "Elm Grove", "Station Road", "Queens Walk", "Bridge End",
                                               "Hill View"};
constexpr std::array<const char*, 10> kCities{"Leeds", "Bristol", "Cork", "Dundee", "Galway",
                                              "Norwich", "Derby", "Bangor", "Exeter", "Preston"};
constexpr std::array<const char*, 10> kPhrases{"Rear collision", "Slipped on ice", "Back strain", "Fractured wrist",
                                               "Routine checkup", "Knee surgery", "Dental repair",
                                               "Whiplash injury", "Lost earnings", "Physiotherapy"};
constexpr std::array<const char*, 8> kCompanies{"Acme Ltd", "Northwind", "Blue Harbor", "Kestrel Group",
                                                "Summit Care", "Riverside NHS", "Oakfield Clinic", "Vertex plc"};
constexpr std::array<const char*, 12> kDistractors{"For office use only", "Page 1 of 2", "Ref", "Checked",
                                                   "Scanned", "Approved", "See overleaf", "Copy",
                                                   "Received", "Batch 7", "Do not write here", "Stamp"};

std::string value_for(const std::string& key, Rng& rng) {
  auto date = [&] {
    return two(1 + pick(rng, 28)) + "/" + two(1 + pick(rng, 12)) + "/" + std::to_string(1950 + pick(rng, 74));
  };
  if (contains_word(key, "Date") || contains_word(key, "Day Worked")) return date();
  if (contains_word(key, "Time")) return two(pick(rng, 24)) + ":" + two(pick(rng, 60));
  if (contains_word(key, "Email")) {
    std::string s = std::string(choose(rng, kFirst)) + "." + choose(rng, kLast) + "@mail.com";
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  }
  if (contains_word(key, "Phone")) return "07" + digits(rng, 9);
  if (contains_word(key, "Sort Code")) return digits(rng, 2) + "-" + digits(rng, 2) + "-" + digits(rng, 2);
  if (contains_word(key, "Postcode")) {
    const std::string letters = "ABCDEFGHJKLMNPRSTUWXYZ";
    auto l = [&] { return letters[pick(rng, letters.size())]; };
    return std::string{l(), l()} + digits(rng, 1) + " " + digits(rng, 1) + std::string{l(), l()};
  }
  if (contains_word(key, "Amount") || contains_word(key, "Earnings")) {
    return std::to_string(20 + pick(rng, 4000)) + "." + two(pick(rng, 100));
  }
  if (contains_word(key, "Days")) return std::to_string(1 + pick(rng, 60));
  if (contains_word(key, "Address")) return std::to_string(1 + pick(rng, 240)) + " " + choose(rng, kStreets);
  if (contains_word(key, "City") || contains_word(key, "Location")) return choose(rng, kCities);
  if (contains_word(key, "Registration")) return std::string("KX") + digits(rng, 2) + " " + "ABC";
  if (contains_word(key, "First Name")) return choose(rng, kFirst);
  if (contains_word(key, "Last Name")) return choose(rng, kLast);
  if (contains_word(key, "Employer") || contains_word(key, "Bank") || contains_word(key, "Hospital") ||
      contains_word(key, "Provider Name")) {
    return choose(rng, kCompanies);
  }
  if (contains_word(key, "Name") || contains_word(key, "Doctor")) {
    return std::string(choose(rng, kFirst)) + " " + choose(rng, kLast);
  }
  if (contains_word(key, "Number") || contains_word(key, "Code")) {
    const std::string letters = "ABCDEFGHJKLMNPRSTUWXYZ";
    return std::string{letters[pick(rng, letters.size())], letters[pick(rng, letters.size())]} + digits(rng, 7);
  }
  return choose(rng, kPhrases);
}

// Positions (in characters) where a token may be cut so that consolidation
// restores the original text: word breaks far enough from the token start to
// earn a space, or short leading fragments inside a word.
std::vector<std::size_t> safe_cuts(const std::string& text) {
  std::vector<std::size_t> cuts;
  const auto min_chars_for_space = static_cast<std::size_t>(std::ceil(60.0 / kCharWidth));
  for (std::size_t k = 1; k + 1 < text.size(); ++k) {
    if (text[k] == ' ') {
      // "ab cd" cut at the space: second piece starts at k+1 characters in.
      if (k + 1 >= min_chars_for_space && text[k - 1] != ' ' && text[k + 1] != ' ') cuts.push_back(k);
    } else if (text[k - 1] != ' ' && static_cast<double>(k) * kCharWidth < 60.0) {
      cuts.push_back(k);
    }
  }
  return cuts;
}

struct Placed {
  Token token;
  std::ptrdiff_t owner = -1;  // template entry index for value text
};

std::vector<Placed> split_tokens(std::vector<Placed> in, double prob, Rng& rng) {
  std::vector<Placed> out;
  out.reserve(in.size() * 2);
  std::bernoulli_distribution split(std::clamp(prob, 0.0, 1.0));
  for (auto& p : in) {
    const bool do_split = prob > 0.0 && split(rng);
    const auto cuts = safe_cuts(p.token.text);
    if (!do_split || cuts.empty()) {
      out.push_back(std::move(p));
      continue;
    }
    const std::size_t k = cuts[pick(rng, cuts.size())];
    const BBox& b = p.token.bbox;
    Placed left = p, right = p;
    if (p.token.text[k] == ' ') {
      left.token.text = p.token.text.substr(0, k);
      right.token.text = p.token.text.substr(k + 1);
      left.token.bbox = {b.x_min, b.y_min, b.x_min + kCharWidth * static_cast<double>(k), b.y_max};
      right.token.bbox = {b.x_min + kCharWidth * static_cast<double>(k + 1), b.y_min, b.x_max, b.y_max};
    } else {
      left.token.text = p.token.text.substr(0, k);
      right.token.text = p.token.text.substr(k);
      const double cut_x = b.x_min + kCharWidth * static_cast<double>(k);
      left.token.bbox = {b.x_min, b.y_min, cut_x, b.y_max};
      right.token.bbox = {cut_x, b.y_min, b.x_max, b.y_max};
    }
    out.push_back(std::move(left));
    out.push_back(std::move(right));
  }
  return out;
}

}  // namespace

GeneratedTemplate generate_template(const LayoutSpec& spec, std::uint64_t seed) {
  if (spec.keys.empty()) throw SpecError("template '" + spec.label + "' has no keys");
  if (spec.columns == 0) throw SpecError("template '" + spec.label + "' needs at least one column");
  for (const auto& k : spec.keys) {
    if (k.empty()) throw SpecError("template '" + spec.label + "' has an empty key");
  }
  Rng rng(seed ^ std::hash<std::string>{}(spec.label));
  const double w = spec.page_width;
  const double h = spec.page_height;

  GeneratedTemplate out;
  out.kie.class_label = spec.label;
  out.blank.source_id = spec.label + "_blank";
  out.blank.page_width = w;
  out.blank.page_height = h;

  std::vector<BBox> occupied;
  auto print = [&](const std::string& text, double x, double y) {
    const BBox b = text_box(x, y, text);
    out.blank.tokens.push_back({text, b, 1.0});
    occupied.push_back(b);
    return b;
  };

  double y = 80.0;
  if (!spec.title.empty()) print(spec.title, kMargin, y);
  y += 60.0;
  for (const auto& line : spec.static_text) {
    print(line, kMargin, y);
    y += kLineStep;
  }
  const double body_top = y + 40.0 + std::round(uniform(rng, 0.0, 30.0));
  const double body_bottom = h - kMargin - kLineStep * static_cast<double>(spec.footer.size()) - 40.0;
  const double x_shift = std::round(uniform(rng, 0.0, 20.0));

  const std::size_t per_column = (spec.keys.size() + spec.columns - 1) / spec.columns;
  const double col_w = (w - 2.0 * kMargin) / static_cast<double>(spec.columns);
  const double needed = spec.placement == Placement::Right ? kValueHeight : kTextHeight + 14.0 + kValueHeight;
  if (spec.row_pitch < needed + 20.0) throw SpecError("row pitch too small: boxes would overlap");

  for (std::size_t q = 0; q < spec.keys.size(); ++q) {
    const auto col = q / per_column;
    const auto row = q % per_column;
    const double kx = kMargin + x_shift + static_cast<double>(col) * col_w;
    const double ky = body_top + static_cast<double>(row) * spec.row_pitch;
    if (ky + needed > body_bottom) {
      throw SpecError("template '" + spec.label + "' overflows the page; reduce keys or row pitch");
    }
    const BBox key_box = print(spec.keys[q], kx, ky);
    BBox value;
    if (spec.placement == Placement::Right) {
      const double vx = key_box.x_max + kKeyValueGap;
      value = {vx, ky, kx + col_w - kColumnTail, ky + kValueHeight};
    } else {
      const double vy = key_box.y_max + 14.0;
      value = {kx, vy, kx + col_w - kColumnTail, vy + kValueHeight};
    }
    if (value.width() < 8.0 * kCharWidth) {
      throw SpecError("key '" + spec.keys[q] + "' leaves no room for its value box");
    }
    occupied.push_back(value);
    out.kie.entries.push_back({spec.keys[q], top_left(key_box), value});
  }

  for (std::size_t k = 0; k < spec.footer.size(); ++k) {
    print(spec.footer[k], kMargin, h - kMargin - kLineStep * static_cast<double>(spec.footer.size() - k));
  }

  const BBox page{0.0, 0.0, w, h};
  for (std::size_t a = 0; a < occupied.size(); ++a) {
    if (!page.contains(occupied[a])) throw SpecError("template '" + spec.label + "' places a box off the page");
    for (std::size_t b = a + 1; b < occupied.size(); ++b) {
      const BBox& p = occupied[a];
      const BBox& r = occupied[b];
      if (p.x_min < r.x_max && r.x_min < p.x_max && p.y_min < r.y_max && r.y_min < p.y_max) {
        throw SpecError("template '" + spec.label + "' has overlapping boxes");
      }
    }
  }
  return out;
}

NoiseModel NoiseModel::noiseless() {
  NoiseModel n;
  n.rotation_deg = 0.0;
  n.scale_min = n.scale_max = 1.0;
  n.jitter_px = 0.0;
  n.token_split_prob = 0.0;
  n.fill_prob = 1.0;
  n.distractor_count = 0;
  n.translate_px = 0.0;
  n.slip_px = 0.0;
  return n;
}

void NoiseModel::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(token_split_prob) || !prob(fill_prob)) throw SpecError("noise probabilities must lie in [0,1]");
  if (!(scale_min > 0.0) || scale_min > scale_max) throw SpecError("noise scale range must satisfy 0 < min <= max");
  if (rotation_deg < 0.0 || jitter_px < 0.0 || translate_px < 0.0 || slip_px < 0.0) {
    throw SpecError("noise magnitudes must be non-negative");
  }
}

GeneratedForm generate_filled_form(const GeneratedTemplate& t, const NoiseModel& noise, const std::string& source_id) {
  noise.validate();
  Rng rng(noise.seed);
  const double w = t.blank.page_width;
  const double h = t.blank.page_height;

  std::vector<Placed> placed;
  std::vector<BBox> taken;
  for (const auto& tok : t.blank.tokens) {
    placed.push_back({tok, -1});
    taken.push_back(tok.bbox);
  }

  GeneratedForm form;
  form.truth.source_id = source_id;
  form.truth.class_label = t.kie.class_label;
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::bernoulli_distribution filled(noise.fill_prob);
  for (std::size_t i = 0; i < t.kie.entries.size(); ++i) {
    const auto& entry = t.kie.entries[i];
    taken.push_back(entry.value_bbox);
    TruthEntry te{entry.key, filled(rng), {}, {}};
    std::string text = value_for(entry.key, rng);
    if (!te.filled) {
      form.truth.entries.push_back(std::move(te));
      continue;
    }
    const auto max_chars = static_cast<std::size_t>(entry.value_bbox.width() / kCharWidth);
    if (text.size() > max_chars) text.resize(max_chars);
    while (!text.empty() && text.back() == ' ') text.pop_back();
    const double jx = noise.jitter_px * jitter(rng);
    const double jy = noise.jitter_px * jitter(rng);
    te.value = text;
    placed.push_back({{text, text_box(entry.value_bbox.x_min + jx, entry.value_bbox.y_min + jy, text), 1.0},
                      static_cast<std::ptrdiff_t>(i)});
    form.truth.entries.push_back(std::move(te));
  }

  for (std::size_t d = 0; d < noise.distractor_count; ++d) {
    const std::string text = choose(rng, kDistractors);
    for (int attempt = 0; attempt < 50; ++attempt) {
      const double bw = kCharWidth * static_cast<double>(text.size());
      const double x = std::round(uniform(rng, 50.0, w - 50.0 - bw));
      const double y = std::round(uniform(rng, 50.0, h - 50.0 - kTextHeight));
      const BBox b = text_box(x, y, text);
      const BBox grown{b.x_min - kDistractorClear, b.y_min - kDistractorClear, b.x_max + kDistractorClear,
                       b.y_max + kDistractorClear};
      if (std::any_of(taken.begin(), taken.end(), [&](const BBox& o) { return grown.intersects(o); })) continue;
      placed.push_back({{text, b, 1.0}, -1});
      taken.push_back(b);
      break;
    }
  }

  placed = split_tokens(std::move(placed), noise.token_split_prob, rng);

  // Page-level distortion: lateral slip below a line, then rotation + scale
  // about the page center, then a shift.
  const double theta = uniform(rng, -noise.rotation_deg, noise.rotation_deg) * std::numbers::pi / 180.0;
  const double scale = uniform(rng, noise.scale_min, noise.scale_max);
  const double tx = uniform(rng, -noise.translate_px, noise.translate_px);
  const double ty = uniform(rng, -noise.translate_px, noise.translate_px);
  const double slip_line = uniform(rng, 0.35 * h, 0.75 * h);
  double slip = noise.slip_px > 0.0 ? uniform(rng, 0.6, 1.0) * noise.slip_px : 0.0;
  if (std::bernoulli_distribution(0.5)(rng)) slip = -slip;
  const Homography global = Homography::translation(tx, ty) * Homography::similarity(theta, scale, {w / 2.0, h / 2.0});

  auto distort = [&](Point p) {
    const double f = std::clamp((p.y - (slip_line - 60.0)) / 120.0, 0.0, 1.0);
    p.x += slip * f * f * (3.0 - 2.0 * f);
    return apply_homography(global, p);
  };
  const BBox page{0.0, 0.0, w, h};

  form.document.source_id = source_id;
  form.document.page_width = w;
  form.document.page_height = h;
  for (auto& p : placed) {
    const BBox& b = p.token.bbox;
    const Point c[4] = {distort({b.x_min, b.y_min}), distort({b.x_max, b.y_min}), distort({b.x_min, b.y_max}),
                        distort({b.x_max, b.y_max})};
    BBox out{c[0].x, c[0].y, c[0].x, c[0].y};
    for (const auto& q : c) out = merge(out, BBox{q.x, q.y, q.x, q.y});
    out = {std::round(out.x_min), std::round(out.y_min), std::round(out.x_max), std::round(out.y_max)};
    if (!out.intersects(page)) {
      if (p.owner >= 0) {  // value pushed off the scan: nothing left to extract
        auto& te = form.truth.entries[static_cast<std::size_t>(p.owner)];
        te.filled = false;
        te.value.clear();
        te.token_indices.clear();
      }
      continue;
    }
    if (p.owner >= 0 && form.truth.entries[static_cast<std::size_t>(p.owner)].filled) {
      form.truth.entries[static_cast<std::size_t>(p.owner)].token_indices.push_back(form.document.tokens.size());
    }
    p.token.bbox = out;
    form.document.tokens.push_back(std::move(p.token));
  }
  return form;
}

DatasetSpec default_dataset_spec() {
  DatasetSpec d;
  auto add = [&](std::string label, std::string title, std::vector<std::string> lines, std::string footer,
                 std::vector<std::string> keys, std::size_t columns, Placement placement, double pitch) {
    LayoutSpec s;
    s.label = std::move(label);
    s.title = std::move(title);
    s.static_text = std::move(lines);
    s.footer = {std::move(footer)};
    s.keys = std::move(keys);
    s.columns = columns;
    s.placement = placement;
    s.row_pitch = pitch;
    d.templates.push_back(std::move(s));
  };
  add("accident_claim_p1", "Accident Claim Form Part A",
      {"Please complete every section in block capitals", "Section 1 policyholder and incident details"},
      "Form ACF 01 revision 3",
      {"Policy Number", "Claim Number", "Last Name", "First Name", "Date of Birth", "Phone Number",
       "Email Address", "Street Address", "City", "Postcode", "Date of Accident", "Time of Accident", "Location",
       "Vehicle Registration", "Police Report Number", "Signature Date"},
      2, Placement::Right, 190.0);
  add("accident_claim_p2", "Accident Claim Form Part B",
      {"Section 2 injuries witnesses and payment", "Attach medical evidence where available"},
      "Form ACF 02 revision 3",
      {"Witness Name", "Witness Phone", "Injury Description", "Hospital Name", "Doctor Name", "Treatment Date",
       "Days Off Work", "Employer Name", "Employer Phone", "Bank Name", "Account Number", "Sort Code"},
      2, Placement::Below, 230.0);
  add("accident_claim_short", "Accident Claim Short Form",
      {"Use this short form for minor incidents only"}, "Form ACF 05",
      {"Policy Number", "Last Name", "First Name", "Date of Accident", "Phone Number", "Location",
       "Signature Date"},
      1, Placement::Right, 220.0);
  add("health_claim_p1", "Health Insurance Claim Part A",
      {"Please complete every section in block capitals", "Section 1 member and provider details"},
      "Form HIC 01 revision 2",
      {"Policy Number", "Member Number", "Last Name", "First Name", "Date of Birth", "Phone Number",
       "Email Address", "Street Address", "City", "Postcode", "Provider Name", "Provider Number",
       "Date of Service", "Diagnosis Code"},
      2, Placement::Right, 200.0);
  add("health_claim_p2", "Health Insurance Claim Part B",
      {"Section 2 treatment costs and payment", "Itemised receipts must be attached"}, "Form HIC 02 revision 2",
      {"Treatment Description", "Service Code", "Amount Claimed", "Amount Paid", "Referral Number",
       "Referring Doctor", "Hospital Name", "Admission Date", "Discharge Date", "Bank Name", "Account Number",
       "Sort Code", "Signature Date"},
      2, Placement::Right, 170.0);
  add("benefit_claim", "Income Benefit Claim",
      {"Complete this form if you are unable to work", "Your employer must countersign section 3"},
      "Form IBC 01",
      {"Claimant Name", "National Insurance Number", "Date of Birth", "Phone Number", "Employer Name",
       "Last Day Worked", "Reason for Claim", "Weekly Earnings", "Bank Name", "Account Number"},
      2, Placement::Below, 250.0);
  return d;
}

Dataset generate_dataset(const DatasetSpec& spec, std::size_t count, std::uint64_t seed) {
  if (spec.templates.empty()) throw SpecError("dataset spec has no templates");
  spec.noise.validate();
  Dataset d;
  for (const auto& t : spec.templates) d.templates.push_back(generate_template(t, seed));
  std::seed_seq seq{seed, spec.noise.seed, static_cast<std::uint64_t>(count)};
  std::vector<std::uint64_t> form_seeds(count);
  Rng master(seq);
  for (auto& s : form_seeds) s = master();
  for (std::size_t k = 0; k < count; ++k) {
    const auto& t = d.templates[k % d.templates.size()];
    NoiseModel noise = spec.noise;
    noise.seed = form_seeds[k];
    char name[32];
    std::snprintf(name, sizeof(name), "form_%05zu", k);
    d.forms.push_back(generate_filled_form(t, noise, name));
  }
  return d;
}

}  // namespace formkie::synth
