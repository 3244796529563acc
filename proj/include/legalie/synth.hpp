#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "legalie/corpus.hpp"
#include "legalie/error.hpp"
#include "legalie/rng.hpp"

namespace legalie::synth {

// Imprisonment months for drunk-driving cases in a year range, conditioned
// on the prior-record flag.
struct PlantedImprisonment {
  int year_from = 2017;
  int year_to = 2018;
  bool prior_record = false;
  double mean = 5.3;
  double stddev = 2.0;
};

// Fraud sentencing as a function of x = log10(loss):
//   months ~ months_slope * x + months_intercept + N(0, months_sigma)
//   P(fine) falls linearly from fine_share_low (x = log10_loss_min) to
//   fine_share_high (x = log10_loss_max); among imprisonment sentences
//   P(suspension) falls likewise from suspension_share_low to
//   suspension_share_high.
struct LossSentencing {
  double log10_loss_min = 5.0;
  double log10_loss_max = 9.0;
  double months_slope = 3.0;
  double months_intercept = -9.0;
  double months_sigma = 1.0;
  double fine_share_low = 0.85;
  double fine_share_high = 0.0;
  double suspension_share_low = 0.9;
  double suspension_share_high = 0.1;
  double fine_to_loss = 0.2;
};

struct SynthConfig {
  std::map<Task, std::size_t> counts;
  std::uint64_t seed = 7;
  double noise_rate = 0.0;
  bool attach_rulings = false;  // facts documents also get an annotated ruling
  double prior_record_rate = 0.4;
  double aiding_rate = 0.2;
  std::vector<PlantedImprisonment> imprisonment{
      {2017, 2018, false, 5.3, 2.0},
      {2017, 2018, true, 7.7, 2.0},
      {2019, 2022, false, 8.9, 2.0},
      {2019, 2022, true, 11.9, 2.0},
  };
  LossSentencing loss_sentencing;
};

inline void validate(const SynthConfig& cfg) {
  if (cfg.noise_rate < 0.0 || cfg.noise_rate > 1.0) throw Error("noise_rate must lie in [0, 1]");
  if (cfg.prior_record_rate < 0.0 || cfg.prior_record_rate > 1.0) throw Error("prior_record_rate must lie in [0, 1]");
  if (cfg.aiding_rate < 0.0 || cfg.aiding_rate > 1.0) throw Error("aiding_rate must lie in [0, 1]");
  for (const auto& p : cfg.imprisonment) {
    if (p.stddev <= 0.0) throw Error("planted imprisonment stddev must be > 0");
    if (p.year_from > p.year_to || p.year_from < 1990 || p.year_to > 2100)
      throw Error("planted imprisonment year range invalid");
  }
  const auto& ls = cfg.loss_sentencing;
  if (ls.months_sigma <= 0.0) throw Error("months_sigma must be > 0");
  if (ls.log10_loss_min >= ls.log10_loss_max) throw Error("log10 loss range must be increasing");
}

// The extraction benchmark: per_task documents for each of the four main
// tasks, no rulings attached. The civil task is auxiliary and opt-in.
inline SynthConfig benchmark_config(std::size_t per_task, std::uint64_t seed, double noise_rate = 0.0,
                                    bool include_civil = false) {
  SynthConfig cfg;
  for (Task t : all_tasks)
    if (t != Task::ruling_civil || include_civil) cfg.counts[t] = per_task;
  cfg.seed = seed;
  cfg.noise_rate = noise_rate;
  return cfg;
}

// Drunk-driving and fraud cases with annotated rulings: the analysis corpus.
inline SynthConfig analysis_config(std::size_t drunk_driving, std::size_t fraud, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.counts[Task::drunk_driving] = drunk_driving;
  cfg.counts[Task::fraud] = fraud;
  cfg.seed = seed;
  cfg.attach_rulings = true;
  return cfg;
}

// ----------------------------------------------------------------------------

inline std::string with_commas(long long v) {
  std::string digits = std::to_string(v);
  std::string out;
  int n = static_cast<int>(digits.size());
  for (int i = 0; i < n; ++i) {
    if (i > 0 && (n - i) % 3 == 0) out += ',';
    out += digits[static_cast<std::size_t>(i)];
  }
  return out;
}

inline std::string won(long long amount) { return with_commas(amount) + " won"; }

inline std::string months_text(int months) {
  auto unit = [](int n, const char* one, const char* many) { return std::to_string(n) + " " + (n == 1 ? one : many); };
  if (months < 12) return unit(months, "month", "months");
  if (months % 12 == 0) return unit(months / 12, "year", "years");
  return unit(months / 12, "year", "years") + " and " + unit(months % 12, "month", "months");
}

namespace detail {

const std::vector<std::string> months_of_year{"January", "February", "March",     "April",   "May",      "June",
                                              "July",    "August",   "September", "October", "November", "December"};

inline std::string date(Rng& rng, int year) {
  return std::to_string(rng.range(1, 28)) + " " + rng.pick(months_of_year) + " " + std::to_string(year);
}

inline std::string article(const std::string& noun) {
  return std::string("aeiouAEIOU").find(noun[0]) != std::string::npos || noun == "SUV" ? "an" : "a";
}

inline long long round_to(double v, long long step) {
  return std::max(step, static_cast<long long>(std::llround(v / static_cast<double>(step))) * step);
}

inline long long random_amount(Rng& rng, double log10_min, double log10_max, long long step) {
  return round_to(std::pow(10.0, rng.uniform(log10_min, log10_max)), step);
}

inline std::string join_sentences(const std::vector<std::string>& s) { return text::join(s, " "); }

// Inserts `clause` at a random sentence boundary (possibly first or last).
inline void insert_distractor(Rng& rng, std::vector<std::string>& sentences, std::string clause) {
  auto pos = static_cast<std::ptrdiff_t>(rng.below(sentences.size() + 1));
  sentences.insert(sentences.begin() + pos, std::move(clause));
}

const std::vector<std::string> vehicles{"sedan", "SUV",  "pickup truck", "motorcycle", "cargo truck",
                                        "van",   "taxi", "scooter",      "minibus",    "compact car"};
const std::vector<std::string> places{"a motel in Yeosu",   "a convenience store", "an apartment complex",
                                      "a parking lot",      "a bus terminal",      "a restaurant",
                                      "a gas station",      "the city hall",       "a university gate",
                                      "a traditional market"};
const std::vector<std::string> roles{"an accounting manager", "a branch treasurer", "an office clerk",
                                     "a sales director",      "a general manager",  "a bookkeeper"};
const std::vector<std::string> companies{"Hanul Trading",  "Daesung Logistics", "Mirae Foods", "Sejong Textiles",
                                         "Nuri Electric",  "Gaon Construction", "Bora Pharmacy"};
const std::vector<std::string> victims{"Kim", "Lee", "Park", "Choi", "Jung", "Kang", "Yoon", "Lim"};

inline std::string benign_sentence(Rng& rng) {
  static const std::vector<std::string> pool{
      "The defendant fully admitted the charges.",
      "The police officer stopped the defendant at a sobriety checkpoint.",
      "The defendant expressed remorse during the trial.",
      "The victim submitted a written statement to the court.",
      "The case was transferred from the district prosecutor's office.",
      "The defendant has a stable residence and family."};
  return rng.pick(pool);
}

inline std::string money_distractor(Rng& rng) {
  long long x = random_amount(rng, 4.0, 7.5, 1000);
  switch (rng.below(3)) {
    case 0: return "At the time, the defendant also owed " + won(x) + " to a private lender.";
    case 1: return "The defendant's monthly income was about " + won(x) + ".";
    default: return "A deposit of " + won(x) + " had been paid for the office.";
  }
}

struct RulingDraw {
  std::vector<std::string> sentences;
  FieldMap labels;
};

enum class SentenceType { fine, prison, suspension };

inline RulingDraw render_ruling(Rng& rng, SentenceType type, int months, long long fine, bool education,
                                bool community, bool combined_fine) {
  RulingDraw r;
  if (type == SentenceType::fine) {
    r.sentences.push_back("The defendant is sentenced to a fine of " + won(fine) + ".");
    r.sentences.push_back(
        "If the defendant fails to pay the fine, the defendant shall be confined in a workhouse for the period "
        "calculated at 100,000 won per day.");
    r.labels["fine"] = {won(fine)};
    return r;
  }
  if (combined_fine) {
    r.sentences.push_back("The defendant is sentenced to imprisonment of " + months_text(months) + " and a fine of " +
                          won(fine) + ".");
    r.labels["fine"] = {won(fine)};
  } else {
    r.sentences.push_back("The defendant is sentenced to imprisonment of " + months_text(months) + ".");
  }
  r.labels["imprisonment"] = {months_text(months)};
  if (type == SentenceType::suspension) {
    int years = static_cast<int>(rng.range(1, 3));
    if (months > 12 && years < 2) years = 2;
    std::string period = months_text(12 * years);
    r.sentences.push_back("The execution of the sentence is suspended for " + period +
                          " from the date this judgment becomes final.");
    r.labels["suspension"] = {period};
    if (education) {
      std::string h = std::to_string(rng.pick(std::vector<int>{40, 80})) + " hours";
      r.sentences.push_back("The defendant is ordered to attend " + h + " of drunk driving prevention education.");
      r.labels["education"] = {h};
    }
    if (community) {
      std::string h = std::to_string(rng.pick(std::vector<int>{80, 120, 160, 200})) + " hours";
      r.sentences.push_back("The defendant is ordered to perform " + h + " of community service.");
      r.labels["community_service"] = {h};
    }
  }
  if (rng.bernoulli(0.3)) r.sentences.push_back("The seized items shall be confiscated.");
  return r;
}

inline std::string ruling_noise(Rng& rng) {
  switch (rng.below(3)) {
    case 0: return "The court costs of " + won(rng.range(1, 9) * 10000) + " shall be borne by the defendant.";
    case 1: return "The detention period before this judgment shall be counted.";
    default: return "The provisional payment order was lifted.";
  }
}

inline void add_ruling(Rng& rng, Document& doc, RulingDraw r, double noise_rate) {
  if (rng.bernoulli(noise_rate)) insert_distractor(rng, r.sentences, ruling_noise(rng));
  doc.ruling = join_sentences(r.sentences);
  for (auto& [k, v] : r.labels) doc.labels[k] = std::move(v);
}

inline const PlantedImprisonment* planted_for(const SynthConfig& cfg, int year, bool record) {
  for (const auto& p : cfg.imprisonment)
    if (year >= p.year_from && year <= p.year_to && p.prior_record == record) return &p;
  return nullptr;
}

inline int draw_months(Rng& rng, double mean, double stddev) {
  return static_cast<int>(std::max(1LL, std::llround(rng.normal(mean, stddev))));
}

inline Document drunk_driving(Rng& rng, const SynthConfig& cfg, std::size_t index) {
  Document doc;
  doc.id = "dd-" + std::to_string(index);
  doc.category = Task::drunk_driving;
  doc.year = static_cast<int>(rng.range(2017, 2022));

  std::string vehicle = rng.pick(vehicles);
  std::string distance = rng.bernoulli(0.6) ? std::to_string(rng.range(5, 900)) + "m" : [&] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1fkm", rng.uniform(1.0, 15.0));
    return std::string(buf);
  }();
  char bac[32];
  std::snprintf(bac, sizeof bac, "%.3f%%", rng.uniform(0.03, 0.25));

  std::vector<std::string> s;
  int record = 0;
  if (rng.bernoulli(cfg.prior_record_rate)) record = rng.bernoulli(0.7) ? 1 : static_cast<int>(rng.range(2, 4));
  if (record >= 2)
    s.push_back("The defendant has " + std::to_string(record) + " prior drunk driving convictions.");
  else if (record == 1)
    s.push_back("On " + detail::date(rng, doc.year - static_cast<int>(rng.range(2, 6))) +
                ", the defendant was fined for drunk driving.");
  s.push_back("On " + date(rng, doc.year) + ", the defendant drove " + article(vehicle) + " " + vehicle +
              (rng.bernoulli(0.5) ? " for approximately " : " for about ") + distance + " from " + rng.pick(places) +
              " to " + rng.pick(places) + " with a blood alcohol content of " + bac + ".");
  if (record == 1)
    s.push_back("The defendant thereby violated the drunk driving prohibition two or more times.");

  doc.labels["bac"] = {bac};
  doc.labels["distance"] = {distance};
  doc.labels["vehicle"] = {vehicle};
  if (record > 0) doc.labels["prior_record"] = {std::to_string(record)};

  if (rng.bernoulli(cfg.noise_rate))
    insert_distractor(rng, s, rng.bernoulli(0.5) ? benign_sentence(rng) : money_distractor(rng));
  doc.facts = join_sentences(s);

  if (cfg.attach_rulings) {
    SentenceType type = rng.bernoulli(0.25) ? SentenceType::fine
                        : rng.bernoulli(0.6) ? SentenceType::suspension
                                             : SentenceType::prison;
    int months = 0;
    if (const auto* p = planted_for(cfg, doc.year, record > 0)) months = draw_months(rng, p->mean, p->stddev);
    else months = draw_months(rng, 8.0, 2.0);
    long long fine = rng.range(5, 30) * 500000;
    bool edu = type == SentenceType::suspension && rng.bernoulli(0.5);
    bool comm = type == SentenceType::suspension && rng.bernoulli(0.4);
    add_ruling(rng, doc, render_ruling(rng, type, months, fine, edu, comm, false), cfg.noise_rate);
  }
  return doc;
}

inline Document embezzlement(Rng& rng, const SynthConfig& cfg, std::size_t index) {
  Document doc;
  doc.id = "em-" + std::to_string(index);
  doc.category = Task::embezzlement;
  doc.year = static_cast<int>(rng.range(2015, 2022));
  int start = doc.year - static_cast<int>(rng.range(2, 12));

  std::vector<std::string> s;
  s.push_back("The defendant worked as " + rng.pick(roles) + " at " + rng.pick(companies) + " from " +
              std::to_string(start) + " to " + std::to_string(doc.year) + " and managed the company funds.");
  long long loss = random_amount(rng, 6.0, 9.0, 1);
  if (rng.bernoulli(0.5)) {
    long long first = random_amount(rng, 5.0, 7.0, 10);
    long long used = std::max(10LL, first / static_cast<long long>(rng.range(2, 9)));
    s.push_back("On " + date(rng, start + 1) + ", the defendant withdrew " + won(first) +
                " from the company account and used " + won(used) + " of it for personal purposes.");
    s.push_back("In this way, the defendant embezzled a total of " + won(loss) + " on " +
                std::to_string(rng.range(3, 80)) + " occasions until " + date(rng, doc.year) + ".");
    if (rng.bernoulli(0.4))
      s.push_back("The defendant later returned " + won(std::max(1LL, loss / rng.range(3, 20))) + " to the victim.");
  } else {
    if (rng.bernoulli(0.5))
      s.push_back("The company account held " + won(random_amount(rng, 7.0, 9.5, 1000)) + " at the time.");
    long long withdrawn = loss + random_amount(rng, 4.0, 6.0, 10);
    s.push_back("On " + date(rng, doc.year) + ", the defendant withdrew " + won(withdrawn) +
                " kept for the victim and embezzled " + won(loss) + " of it for personal expenses.");
  }
  doc.labels["embezzled_money"] = {won(loss)};
  if (rng.bernoulli(cfg.noise_rate)) insert_distractor(rng, s, money_distractor(rng));
  doc.facts = join_sentences(s);
  return doc;
}

inline Document fraud(Rng& rng, const SynthConfig& cfg, std::size_t index) {
  Document doc;
  doc.id = "fr-" + std::to_string(index);
  doc.category = Task::fraud;
  doc.year = static_cast<int>(rng.range(2015, 2022));
  const auto& ls = cfg.loss_sentencing;
  double x = rng.uniform(ls.log10_loss_min, ls.log10_loss_max);
  long long loss = std::max(1000LL, static_cast<long long>(std::llround(std::pow(10.0, x) / 1000.0)) * 1000);
  std::string victim = rng.pick(victims);

  std::vector<std::string> s;
  bool aiding = rng.bernoulli(cfg.aiding_rate);
  if (aiding) {
    s.push_back("The defendant handed over an access card for a bank account to an unidentified fraud ring.");
    s.push_back("The defendant thereby aided the fraud in which the victim " + victim + " transferred " + won(loss) +
                " to that account.");
    doc.labels["loss_aiding"] = {won(loss)};
  } else {
    long long bait = random_amount(rng, 4.0, 7.0, 10000);
    switch (rng.below(3)) {
      case 0:
        s.push_back("The defendant told the victim " + victim + " that a loan of " + won(bait) +
                    " would be repaid within a month, but had no intention or ability to repay it.");
        break;
      case 1:
        s.push_back("The defendant told the victim " + victim + " that an investment of " + won(bait) +
                    " would double in six months, which was false.");
        break;
      default:
        s.push_back("The defendant offered the victim " + victim + " a used car for " + won(bait) +
                    " without owning any car.");
        break;
    }
    if (rng.bernoulli(0.5)) {
      s.push_back("The defendant deceived the victim in this way and received a total of " + won(loss) + " on " +
                  std::to_string(rng.range(2, 60)) + " occasions.");
      if (rng.bernoulli(0.4))
        s.push_back("The defendant spent " + won(std::max(1000LL, loss / rng.range(2, 10) / 1000 * 1000)) +
                    " of the money on gambling.");
    } else {
      s.push_back("The defendant deceived the victim in this way and received " + won(loss) + " as a down payment.");
    }
    doc.labels["loss"] = {won(loss)};
  }
  if (rng.bernoulli(cfg.noise_rate)) insert_distractor(rng, s, money_distractor(rng));
  doc.facts = join_sentences(s);

  if (cfg.attach_rulings) {
    double t = (x - ls.log10_loss_min) / (ls.log10_loss_max - ls.log10_loss_min);
    double p_fine = ls.fine_share_low + (ls.fine_share_high - ls.fine_share_low) * t;
    double p_susp = ls.suspension_share_low + (ls.suspension_share_high - ls.suspension_share_low) * t;
    SentenceType type = rng.bernoulli(p_fine)   ? SentenceType::fine
                        : rng.bernoulli(p_susp) ? SentenceType::suspension
                                                : SentenceType::prison;
    int months = static_cast<int>(
        std::max(1LL, std::llround(ls.months_slope * x + ls.months_intercept + rng.normal(0.0, ls.months_sigma))));
    long long fine = round_to(ls.fine_to_loss * static_cast<double>(loss), 10000);
    bool comm = type == SentenceType::suspension && rng.bernoulli(0.2);
    add_ruling(rng, doc, render_ruling(rng, type, months, fine, false, comm, false), cfg.noise_rate);
  }
  return doc;
}

inline Document ruling_criminal(Rng& rng, const SynthConfig& cfg, std::size_t index) {
  Document doc;
  doc.id = "rc-" + std::to_string(index);
  doc.category = Task::ruling_criminal;
  doc.year = static_cast<int>(rng.range(2015, 2022));
  SentenceType type = rng.bernoulli(0.3)   ? SentenceType::fine
                      : rng.bernoulli(0.6) ? SentenceType::suspension
                                           : SentenceType::prison;
  int months = static_cast<int>(rng.range(4, 36));
  long long fine = rng.range(2, 60) * 500000;
  bool edu = type == SentenceType::suspension && rng.bernoulli(0.35);
  bool comm = type == SentenceType::suspension && rng.bernoulli(0.3);
  bool combined = type != SentenceType::fine && rng.bernoulli(0.15);
  add_ruling(rng, doc, render_ruling(rng, type, months, fine, edu, comm, combined), cfg.noise_rate);
  return doc;
}

inline Document ruling_civil(Rng& rng, const SynthConfig& cfg, std::size_t index) {
  Document doc;
  doc.id = "cv-" + std::to_string(index);
  doc.category = Task::ruling_civil;
  doc.year = static_cast<int>(rng.range(2015, 2022));
  long long claimed = random_amount(rng, 6.0, 9.0, 10000);
  long long approved = std::max(10000LL, claimed / rng.range(1, 4) / 10000 * 10000);
  std::vector<std::string> s;
  s.push_back("The defendant shall pay the plaintiff " + won(approved) + " with interest.");
  if (rng.bernoulli(0.8)) {
    std::string ratio = std::to_string(rng.range(1, 9) * 10) + "%";
    s.push_back("The plaintiff shall bear " + ratio + " of the litigation costs, and the defendant shall bear the rest.");
    doc.labels["cost_ratio"] = {ratio};
  } else {
    s.push_back("The litigation costs shall be borne by the defendant.");
  }
  s.push_back("The plaintiff claimed payment of " + won(claimed) + ".");
  doc.labels["approved_money"] = {won(approved)};
  doc.labels["claimed_money"] = {won(claimed)};
  if (rng.bernoulli(cfg.noise_rate)) insert_distractor(rng, s, benign_sentence(rng));
  doc.ruling = join_sentences(s);
  return doc;
}

}  // namespace detail

// Labels are exactly the values planted into the templated text.
inline std::vector<Document> generate_synthetic(const SynthConfig& cfg) {
  validate(cfg);
  std::vector<Document> docs;
  for (Task t : all_tasks) {
    auto it = cfg.counts.find(t);
    std::size_t n = it == cfg.counts.end() ? 0 : it->second;
    // one stream per task keeps a task's documents independent of other counts
    Rng rng(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(t) + 1);
    for (std::size_t i = 0; i < n; ++i) {
      switch (t) {
        case Task::drunk_driving: docs.push_back(detail::drunk_driving(rng, cfg, i)); break;
        case Task::embezzlement: docs.push_back(detail::embezzlement(rng, cfg, i)); break;
        case Task::fraud: docs.push_back(detail::fraud(rng, cfg, i)); break;
        case Task::ruling_criminal: docs.push_back(detail::ruling_criminal(rng, cfg, i)); break;
        case Task::ruling_civil: docs.push_back(detail::ruling_civil(rng, cfg, i)); break;
      }
    }
  }
  return docs;
}

// --- config JSON ---

inline SynthConfig config_from_json(const nlohmann::json& j) {
  SynthConfig cfg;
  if (j.contains("counts"))
    for (const auto& [k, v] : j.at("counts").items()) {
      auto n = v.get<long long>();
      if (n < 0) throw Error("document count for " + k + " must be >= 0");
      cfg.counts[task_from_string(k)] = static_cast<std::size_t>(n);
    }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.noise_rate = j.value("noise_rate", cfg.noise_rate);
  cfg.attach_rulings = j.value("attach_rulings", cfg.attach_rulings);
  cfg.prior_record_rate = j.value("prior_record_rate", cfg.prior_record_rate);
  cfg.aiding_rate = j.value("aiding_rate", cfg.aiding_rate);
  if (j.contains("imprisonment")) {
    cfg.imprisonment.clear();
    for (const auto& p : j.at("imprisonment"))
      cfg.imprisonment.push_back({p.at("year_from").get<int>(), p.at("year_to").get<int>(),
                                  p.at("prior_record").get<bool>(), p.at("mean").get<double>(),
                                  p.at("stddev").get<double>()});
  }
  if (j.contains("loss_sentencing")) {
    const auto& l = j.at("loss_sentencing");
    auto& ls = cfg.loss_sentencing;
    ls.log10_loss_min = l.value("log10_loss_min", ls.log10_loss_min);
    ls.log10_loss_max = l.value("log10_loss_max", ls.log10_loss_max);
    ls.months_slope = l.value("months_slope", ls.months_slope);
    ls.months_intercept = l.value("months_intercept", ls.months_intercept);
    ls.months_sigma = l.value("months_sigma", ls.months_sigma);
    ls.fine_share_low = l.value("fine_share_low", ls.fine_share_low);
    ls.fine_share_high = l.value("fine_share_high", ls.fine_share_high);
    ls.suspension_share_low = l.value("suspension_share_low", ls.suspension_share_low);
    ls.suspension_share_high = l.value("suspension_share_high", ls.suspension_share_high);
    ls.fine_to_loss = l.value("fine_to_loss", ls.fine_to_loss);
  }
  validate(cfg);
  return cfg;
}

}  // namespace legalie::synth
