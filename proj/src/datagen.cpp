#include "wta/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "wta/rng.hpp"
#include "wta/text.hpp"

namespace wta {

const std::vector<Mechanism>& all_mechanisms() {
  static const std::vector<Mechanism> all = {
      Mechanism::overwrite_final_slot,    Mechanism::cumulative_total,
      Mechanism::tiered_discount_total,   Mechanism::fee_or_threshold_decision,
      Mechanism::exclusion_choice,        Mechanism::bounded_window_selection,
      Mechanism::quantity_update,         Mechanism::eligibility_decision,
      Mechanism::refund_or_credit_total,  Mechanism::schedule_window_resolution,
  };
  return all;
}

const char* mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::overwrite_final_slot: return "overwrite_final_slot";
    case Mechanism::cumulative_total: return "cumulative_total";
    case Mechanism::tiered_discount_total: return "tiered_discount_total";
    case Mechanism::fee_or_threshold_decision: return "fee_or_threshold_decision";
    case Mechanism::exclusion_choice: return "exclusion_choice";
    case Mechanism::bounded_window_selection: return "bounded_window_selection";
    case Mechanism::quantity_update: return "quantity_update";
    case Mechanism::eligibility_decision: return "eligibility_decision";
    case Mechanism::refund_or_credit_total: return "refund_or_credit_total";
    case Mechanism::schedule_window_resolution: return "schedule_window_resolution";
  }
  return "?";
}

Mechanism mechanism_from_name(const std::string& name) {
  for (auto m : all_mechanisms()) {
    if (name == mechanism_name(m)) return m;
  }
  throw std::invalid_argument("unknown mechanism: " + name);
}

const char* difficulty_name(Difficulty d) {
  switch (d) {
    case Difficulty::easy: return "easy";
    case Difficulty::medium: return "medium";
    case Difficulty::hard: return "hard";
  }
  return "?";
}

Difficulty difficulty_from_name(const std::string& name) {
  if (name == "easy") return Difficulty::easy;
  if (name == "medium") return Difficulty::medium;
  if (name == "hard") return Difficulty::hard;
  throw std::invalid_argument("unknown difficulty: " + name);
}

int difficulty_level(Difficulty d) {
  switch (d) {
    case Difficulty::easy: return 1;
    case Difficulty::medium: return 2;
    case Difficulty::hard: return 3;
  }
  return 1;
}

// ---------------------------------------------------------------------------
// answer folding
// ---------------------------------------------------------------------------

namespace {

struct SlotFold {
  double total = 0.0;
  std::string value;
  bool set = false;
};

std::map<std::string, SlotFold> fold_slots(const std::vector<StateDelta>& deltas) {
  std::map<std::string, SlotFold> slots;
  for (const auto& d : deltas) {
    auto& s = slots[d.slot];
    if (d.kind == DeltaKind::assign) {
      s.total = d.amount;
      s.value = d.value;
    } else {
      s.total += d.amount;
      s.value = format_number(s.total);
    }
    s.set = true;
  }
  return slots;
}

std::string last_assigned(const std::vector<StateDelta>& deltas, const std::string& slot) {
  std::string out = "unknown";
  for (const auto& d : deltas) {
    if (d.slot == slot) out = d.kind == DeltaKind::assign ? d.value : format_number(d.amount);
  }
  auto slots = fold_slots(deltas);
  auto it = slots.find(slot);
  if (it != slots.end()) out = it->second.value;
  return out;
}

}  // namespace

std::string fold_answer(Mechanism mechanism, const std::vector<StateDelta>& deltas) {
  auto slots = fold_slots(deltas);
  auto total_of = [&](const char* slot) {
    auto it = slots.find(slot);
    return it == slots.end() ? 0.0 : it->second.total;
  };
  switch (mechanism) {
    case Mechanism::cumulative_total:
      return format_number(total_of("total"));
    case Mechanism::quantity_update:
      return format_number(total_of("count"));
    case Mechanism::refund_or_credit_total:
      return format_number(total_of("balance"));
    case Mechanism::tiered_discount_total: {
      const double base = total_of("base");
      const double discount = total_of("discount");
      return format_number(std::round(base * (100.0 - discount) / 100.0));
    }
    case Mechanism::fee_or_threshold_decision: {
      const double cart = total_of("cart");
      const double threshold = total_of("threshold");
      return cart >= threshold ? "no" : "yes";
    }
    case Mechanism::overwrite_final_slot:
      return last_assigned(deltas, "time");
    case Mechanism::schedule_window_resolution:
      return last_assigned(deltas, "slot");
    case Mechanism::eligibility_decision:
      return last_assigned(deltas, "eligible");
    case Mechanism::exclusion_choice:
    case Mechanism::bounded_window_selection:
      return last_assigned(deltas, "pick");
  }
  throw std::invalid_argument("fold_answer: unknown mechanism");
}

// ---------------------------------------------------------------------------
// record assembly
// ---------------------------------------------------------------------------

namespace {

const std::map<int, std::string>& number_words() {
  static const std::map<int, std::string> words = {
      {1, "one"},     {2, "two"},      {3, "three"},   {4, "four"},    {5, "five"},
      {6, "six"},     {7, "seven"},    {8, "eight"},   {9, "nine"},    {10, "ten"},
      {11, "eleven"}, {12, "twelve"},  {13, "thirteen"}, {14, "fourteen"}, {15, "fifteen"},
      {16, "sixteen"}, {17, "seventeen"}, {18, "eighteen"}, {19, "nineteen"}, {20, "twenty"},
      {30, "thirty"}, {40, "forty"},   {50, "fifty"},  {60, "sixty"},  {70, "seventy"},
      {80, "eighty"}, {90, "ninety"},
  };
  return words;
}

struct Builder {
  std::vector<std::string> words;
  std::vector<AnchorSpec> anchors;
  std::set<std::string> used_anchor_words;
  std::size_t last_anchor_word = 0;

  void say(std::string_view phrase) {
    for (auto& tok : tokenize(phrase)) words.push_back(std::move(tok));
  }

  // Registers `word` as an anchor; anchor words double as record keys so they
  // must be unique within one record.
  void anchor(const std::string& word, AnchorKind kind, StateDelta delta = {}) {
    if (!used_anchor_words.insert(word).second)
      throw std::logic_error("duplicate anchor word in generator: " + word);
    AnchorSpec spec;
    spec.word_index = words.size();
    spec.kind = kind;
    spec.delta = std::move(delta);
    anchors.push_back(std::move(spec));
    last_anchor_word = words.size();
    words.push_back(word);
  }

  // Picks an amount whose single-word form is still unused as an anchor.
  int pick_number(Rng& rng, const std::vector<int>& pool) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const int n = pool[rng.pick(pool.size())];
      if (!used_anchor_words.count(number_words().at(n))) return n;
    }
    for (int n : pool) {
      if (!used_anchor_words.count(number_words().at(n))) return n;
    }
    throw std::logic_error("number pool exhausted");
  }
};

StateDelta assign(std::string slot, std::string value, double amount = 0.0) {
  StateDelta d;
  d.kind = DeltaKind::assign;
  d.slot = std::move(slot);
  d.value = std::move(value);
  d.amount = amount;
  return d;
}

StateDelta add(std::string slot, double amount) {
  StateDelta d;
  d.kind = DeltaKind::add;
  d.slot = std::move(slot);
  d.value = format_number(amount);
  d.amount = amount;
  return d;
}

const char* pick_of(Rng& rng, const std::vector<const char*>& bank) {
  return bank[rng.pick(bank.size())];
}

void maybe_filler(Rng& rng, Builder& b, double p = 0.35) {
  static const std::vector<const char*> kFillers = {
      "let me check my notes", "hang on one second", "give me a moment here",
      "sorry just double checking", "bear with me"};
  static const std::vector<const char*> kPauses = {"um", "uh", "hmm", "er"};
  if (rng.uniform() < p) b.say(pick_of(rng, kFillers));
  if (rng.uniform() < 0.30) {
    for (const char* w : kPauses) {
      if (!b.used_anchor_words.count(w)) {
        b.anchor(w, AnchorKind::pause_filler);
        break;
      }
    }
  }
}

void closing(Rng& rng, Builder& b) {
  static const std::vector<const char*> kClosers = {
      "that should be everything thanks", "and that is all i have thanks",
      "thanks so much for the help", "okay that covers it thanks"};
  b.say(pick_of(rng, kClosers));
}

int state_count(Rng& rng, Difficulty d, int easy_lo, int easy_hi, int med_lo, int med_hi,
                int hard_lo, int hard_hi) {
  switch (d) {
    case Difficulty::easy: return rng.uniform_int(easy_lo, easy_hi);
    case Difficulty::medium: return rng.uniform_int(med_lo, med_hi);
    case Difficulty::hard: return rng.uniform_int(hard_lo, hard_hi);
  }
  return easy_lo;
}

// --- mechanism scripts -----------------------------------------------------

void gen_cumulative_total(Rng& rng, Difficulty diff, Builder& b, Record& rec) {
  rec.task_kind = TaskKind::numeric;
  rec.question_text = "What is the final total?";
  const int n = state_count(rng, diff, 2, 3, 4, 6, 11, 13);
  const std::vector<int> pool = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19};
  b.say(pick_of(rng, {"okay so i am keeping a running total here",
                      "alright i need you to track a total for me",
                      "so let us add this up as i go"}));
  const int first = b.pick_number(rng, pool);
  b.say(pick_of(rng, {"i start with", "we begin with", "first i have"}));
  b.anchor(number_words().at(first), AnchorKind::state_update,
           assign("total", format_number(first), first));
  b.say(pick_of(rng, {"items", "points", "boxes"}));
  for (int i = 1; i < n; ++i) {
    maybe_filler(rng, b);
    const int amount = b.pick_number(rng, pool);
    b.say(pick_of(rng, {"then add", "now add", "plus another", "and then"}));
    b.anchor(number_words().at(amount), AnchorKind::state_update, add("total", amount));
    b.say(pick_of(rng, {"more", "on top", "as well"}));
  }
  b.say("so what is the total now");
}

void gen_quantity_update(Rng& rng, Difficulty diff, Builder& b, Record& rec) {
  rec.task_kind = TaskKind::numeric;
  rec.question_text = "How many people are confirmed?";
  const int n = state_count(rng, diff, 2, 3, 4, 6, 10, 12);
  const std::vector<int> pool = {2, 3, 4, 5, 6, 7, 8, 9, 11, 13, 16, 17, 19};
  b.say(pick_of(rng, {"quick update on the guest list for saturday",
                      "about the headcount for the workshop"}));
  const int first = b.pick_number(rng, {10, 12, 14, 15, 16, 18, 20});
  b.say("we had");
  b.anchor(number_words().at(first), AnchorKind::state_update,
           assign("count", format_number(first), first));
  b.say("people confirmed");
  double running = first;
  for (int i = 1; i < n; ++i) {
    maybe_filler(rng, b);
    int amount = b.pick_number(rng, pool);
    bool drop = rng.uniform() < 0.5;
    if (drop && running - amount < 1) drop = false;
    // The stream must not end back where it started.
    for (int attempt = 0; i + 1 == n && running + (drop ? -amount : amount) == first; ++attempt) {
      amount = b.pick_number(rng, pool);
      drop = drop && running - amount >= 1;
      if (attempt > 16) break;
    }
    if (drop) {
      b.say(pick_of(rng, {"then", "and"}));
      b.anchor(number_words().at(amount), AnchorKind::state_update, add("count", -amount));
      b.say(pick_of(rng, {"had to cancel", "dropped out"}));
      running -= amount;
    } else {
      b.say(pick_of(rng, {"then", "and"}));
      b.anchor(number_words().at(amount), AnchorKind::state_update, add("count", amount));
      b.say(pick_of(rng, {"more joined", "signed up late"}));
      running += amount;
    }
  }
  b.say("so how many are we at");
}

void gen_refund_or_credit_total(Rng& rng, Difficulty diff, Builder& b, Record& rec) {
  rec.task_kind = TaskKind::numeric;
  rec.question_text = "What is the final amount on the bill?";
  const int n = state_count(rng, diff, 2, 3, 4, 6, 11, 13);
  b.say(pick_of(rng, {"i am sorting out a billing mess",
                      "trying to reconcile this invoice"}));
  const int first = b.pick_number(rng, {40, 50, 60, 70, 80, 90});
  b.say("the order came to");
  b.anchor(number_words().at(first), AnchorKind::state_update,
           assign("balance", format_number(first), first));
  b.say("dollars");
  double running = first;
  const std::vector<int> pool = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  for (int i = 1; i < n; ++i) {
    maybe_filler(rng, b);
    int amount = b.pick_number(rng, pool);
    bool credit = rng.uniform() < 0.55;
    if (credit && running - amount < 1) credit = false;
    for (int attempt = 0; i + 1 == n && running + (credit ? -amount : amount) == first;
         ++attempt) {
      amount = b.pick_number(rng, pool);
      credit = credit && running - amount >= 1;
      if (attempt > 16) break;
    }
    if (credit) {
      b.say(pick_of(rng, {"they refunded", "then a credit of"}));
      b.anchor(number_words().at(amount), AnchorKind::state_update, add("balance", -amount));
      b.say(pick_of(rng, {"for the damaged item", "came through", "back to the card"}));
      running -= amount;
    } else {
      b.say(pick_of(rng, {"then a late fee of", "plus a surcharge of"}));
      b.anchor(number_words().at(amount), AnchorKind::state_update, add("balance", amount));
      b.say("dollars");
      running += amount;
    }
  }
  b.say("so what do i actually owe");
}

void gen_tiered_discount_total(Rng& rng, Difficulty diff, Builder& b, Record& rec) {
  rec.task_kind = TaskKind::numeric;
  rec.question_text = "What is the discounted total?";
  const int n_discounts = state_count(rng, diff, 1, 1, 2, 2, 3, 3);
  const int base = b.pick_number(rng, {40, 60, 80});
  b.say(pick_of(rng, {"checking out my cart online", "about this order i am placing"}));
  b.say("the cart comes to");
  b.anchor(number_words().at(base), AnchorKind::state_update,
           assign("base", format_number(base), base));
  b.say("dollars");
  std::vector<int> tiers = {10, 15, 20, 50};
  for (int i = 0; i < n_discounts; ++i) {
    maybe_filler(rng, b);
    const int d = b.pick_number(rng, tiers);
    if (i == 0) {
      b.say("the standard tier takes");
    } else {
      b.say(pick_of(rng, {"wait actually my tier gives", "no the better tier is"}));
    }
    b.anchor(number_words().at(d), AnchorKind::state_update,
             assign("discount", format_number(d), d));
    b.say("percent off");
  }
  b.say("so what does it come out to");
}

void gen_fee_or_threshold_decision(Rng& rng, Difficulty diff, Builder& b, Record& rec) {
  rec.task_kind = TaskKind::short_answer;
  rec.question_text = "Do I pay the shipping fee?";
  const int n_adds = state_count(rng, diff, 1, 2, 3, 4, 5, 6);
  const int threshold = b.pick_number(rng, {40, 50, 60});
  b.say("so this store says shipping is free over");
  b.anchor(number_words().at(threshold), AnchorKind::state_update,
           assign("threshold", format_number(threshold), threshold));
  b.say("dollars");
  const int start = b.pick_number(rng, {10, 12, 15, 20});
  b.say("right now the cart is at");
  b.anchor(number_words().at(start), AnchorKind::state_update, add("cart", start));
  double running = start;
  const std::vector<int> pool = {2, 3, 4, 5, 6, 7, 8, 9, 11, 13, 14, 16, 17, 18, 19};
  for (int i = 0; i < n_adds; ++i) {
    maybe_filler(rng, b);
    int amount = b.pick_number(rng, pool);
    if (i + 1 == n_adds && running + amount < threshold) {
      // The late item must push the cart across the free-shipping line.
      std::vector<int> big;
      for (int v : {20, 30, 40, 50, 60, 70, 80, 90}) {
        if (running + v >= threshold && !b.used_anchor_words.count(number_words().at(v)))
          big.push_back(v);
      }
      amount = big.empty() ? 90 : b.pick_number(rng, big);
    }
    b.say(pick_of(rng, {"adding socks for", "then a mug for", "also a cable for",
                        "and a notebook for", "tossing in a snack for", "plus a charger for"}));
    b.anchor(number_words().at(amount), AnchorKind::state_update, add("cart", amount));
    b.say("dollars");
    running += amount;
  }
  b.say("so do i still pay for shipping");
}

void gen_overwrite_final_slot(Rng& rng, Difficulty diff, Builder& b, Record& rec) {
  rec.task_kind = TaskKind::short_answer;
  rec.question_text = "What time are we meeting?";
  const int n = state_count(rng, diff, 2, 3, 4, 6, 9, 11);
  b.say(pick_of(rng, {"about meeting up later today", "planning our catch up"}));
  std::vector<int> hours = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  const int first = b.pick_number(rng, hours);
  b.say("let us meet at");
  b.anchor(number_words().at(first), AnchorKind::state_update,
           assign("time", format_number(first) + "pm", first));
  b.say("pm");
  for (int i = 1; i < n; ++i) {
    maybe_filler(rng, b);
    const int h = b.pick_number(rng, hours);
    b.say(pick_of(rng, {"actually make it", "no wait let us do", "better push it to",
                        "scratch that say"}));
    b.anchor(number_words().at(h), AnchorKind::state_update,
             assign("time", format_number(h) + "pm", h));
    b.say("pm");
  }
  b.say("so when are we on");
}

void gen_schedule_window_resolution(Rng& rng, Difficulty diff, Builder& b, Record& rec) {
  rec.task_kind = TaskKind::short_answer;
  rec.question_text = "What time does the appointment land on?";
  const int n = state_count(rng, diff, 2, 3, 3, 4, 5, 6);
  b.say(pick_of(rng, {"trying to pin down the technician visit",
                      "scheduling the repair slot"}));
  std::vector<int> hours = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  const int first = b.pick_number(rng, hours);
  b.say("the window opens at");
  b.anchor(number_words().at(first), AnchorKind::state_update,
           assign("slot", format_number(first) + "pm", first));
  b.say("pm");
  for (int i = 1; i < n; ++i) {
    maybe_filler(rng, b);
    const int h = b.pick_number(rng, hours);
    b.say(pick_of(rng, {"but the dentist runs long so call it",
                        "they asked to shift it to", "traffic means more like",
                        "the earlier slot fell through so"}));
    b.anchor(number_words().at(h), AnchorKind::state_update,
             assign("slot", format_number(h) + "pm", h));
    b.say("pm");
  }
  b.say("so when should i be home");
}

void gen_eligibility_decision(Rng& rng, Difficulty diff, Builder& b, Record& rec) {
  rec.task_kind = TaskKind::short_answer;
  rec.question_text = "Am I eligible for the discount?";
  // Even number of flips so the early yes ends as a no, or vice versa.
  const int n = diff == Difficulty::easy ? 2 : 4;
  b.say("about that loyalty discount");
  struct Flip {
    const char* word;
    const char* before;
    const char* after;
  };
  static const std::vector<Flip> kYes = {
      {"member", "i am a", "here already"},
      {"signed", "i", "up last week"},
      {"promo", "the spring", "waives the waiting rule"},
      {"coupon", "and my", "should cover it"},
  };
  static const std::vector<Flip> kNo = {
      {"month", "oh wait it needs a full", "of standing first"},
      {"expired", "hmm my card may have", "last winter"},
      {"excluded", "sale items are", "from the program"},
      {"lapsed", "my account", "over the summer"},
  };
  std::size_t yi = rng.pick(2), ni = rng.pick(2);
  for (int i = 0; i < n; ++i) {
    maybe_filler(rng, b, 0.2);
    const bool yes = (i % 2) == 0;
    const auto& f = yes ? kYes[yi++ % kYes.size()] : kNo[ni++ % kNo.size()];
    b.say(f.before);
    b.anchor(f.word, AnchorKind::state_update, assign("eligible", yes ? "yes" : "no"));
    b.say(f.after);
  }
  b.say("so does the discount apply to me");
}

void gen_exclusion_choice(Rng& rng, Difficulty diff, Builder& b, Record& rec) {
  rec.task_kind = TaskKind::multiple_choice;
  rec.question_text = "Which one should I get?";
  static const std::vector<std::pair<const char*, const char*>> kItems = {
      {"blue", "blue mug"},   {"red", "red bowl"},   {"green", "green cup"},
      {"tall", "tall glass"}, {"steel", "steel pot"}, {"oak", "oak tray"}};
  const int n_opts = diff == Difficulty::hard ? 4 : 3;
  std::vector<std::size_t> opts;
  while (static_cast<int>(opts.size()) < n_opts) {
    const auto c = rng.pick(kItems.size());
    if (std::find(opts.begin(), opts.end(), c) == opts.end()) opts.push_back(c);
  }
  for (auto o : opts) rec.choices.push_back(kItems[o].second);

  b.say("i am choosing between");
  for (std::size_t i = 0; i < opts.size(); ++i) {
    if (i + 1 == opts.size()) b.say("and");
    b.say(std::string("the ") + kItems[opts[i]].second);
  }
  // Survivor must not be the first-listed option, and the first elimination
  // must not expose it, so the early leading candidate differs from the gold.
  const std::size_t survivor = 1 + rng.pick(opts.size() - 1);
  std::vector<std::size_t> to_eliminate;
  for (std::size_t i = 0; i < opts.size(); ++i) {
    if (i != survivor && i != 0) to_eliminate.push_back(i);
  }
  // shuffle the tail eliminations, then eliminate option 0 somewhere after the first
  for (std::size_t i = to_eliminate.size(); i > 1; --i) {
    std::swap(to_eliminate[i - 1], to_eliminate[rng.pick(i)]);
  }
  const std::size_t insert_at = 1 + rng.pick(to_eliminate.size());
  to_eliminate.insert(to_eliminate.begin() + static_cast<std::ptrdiff_t>(insert_at), 0);

  std::vector<bool> standing(opts.size(), true);
  for (std::size_t gone : to_eliminate) {
    maybe_filler(rng, b, 0.25);
    standing[gone] = false;
    std::string best = "unknown";
    for (std::size_t i = 0; i < opts.size(); ++i) {
      if (standing[i]) {
        best = kItems[opts[i]].second;
        break;
      }
    }
    b.say(pick_of(rng, {"not the", "skip the", "forget the"}));
    b.anchor(kItems[opts[gone]].first, AnchorKind::state_update, assign("pick", best));
    const std::string rest = tokenize(kItems[opts[gone]].second)[1];
    b.say(rest + " " + pick_of(rng, {"it is chipped", "too pricey", "it is out of stock",
                                     "wrong size for the shelf"}));
  }
  b.say("so which one works best");
}

void gen_bounded_window_selection(Rng& rng, Difficulty diff, Builder& b, Record& rec) {
  rec.task_kind = TaskKind::multiple_choice;
  rec.question_text = "Which one should I buy?";
  static const std::vector<const char*> kItems = {"fan", "heater", "lamp", "kettle", "mixer"};
  const int n_items = diff == Difficulty::easy ? 2 : 3;
  std::vector<std::size_t> items;
  while (static_cast<int>(items.size()) < n_items) {
    const auto c = rng.pick(kItems.size());
    if (std::find(items.begin(), items.end(), c) == items.end()) items.push_back(c);
  }
  for (auto i : items) rec.choices.push_back(kItems[i]);

  b.say("i am shopping for one appliance today and i want the nicest one i can afford");
  const int budget1 = 50;
  b.say("my budget is");
  b.anchor(number_words().at(budget1), AnchorKind::state_update, assign("pick", "none yet"));
  b.say("dollars tops");

  std::vector<int> seen_prices;
  auto best_under = [&](int budget) -> std::string {
    int best_price = -1;
    std::size_t best_item = 0;
    for (std::size_t i = 0; i < seen_prices.size(); ++i) {
      if (seen_prices[i] <= budget && seen_prices[i] > best_price) {
        best_price = seen_prices[i];
        best_item = i;
      }
    }
    return best_price < 0 ? "none yet" : kItems[items[best_item]];
  };

  for (int i = 0; i < n_items; ++i) {
    maybe_filler(rng, b, 0.2);
    // First price is affordable now, the second only after the late budget
    // stretch, any third never; the stretch is guaranteed to change the pick.
    int p = 60;
    if (i == 0) p = b.pick_number(rng, {20, 30, 40});
    if (i >= 2) p = b.pick_number(rng, {80, 90});
    seen_prices.push_back(p);
    b.say(std::string("the ") + kItems[items[static_cast<std::size_t>(i)]] +
          std::string(" runs"));
    b.anchor(number_words().at(p), AnchorKind::state_update, assign("pick", best_under(budget1)));
    b.say("dollars");
  }
  const int budget2 = 70;
  b.say("actually i can stretch the budget to");
  b.anchor(number_words().at(budget2), AnchorKind::state_update,
           assign("pick", best_under(budget2)));
  b.say("if it is worth it");
  b.say("so which should i grab");
}

// ---------------------------------------------------------------------------

void run_mechanism(Mechanism m, Rng& rng, Difficulty diff, Builder& b, Record& rec) {
  switch (m) {
    case Mechanism::cumulative_total: return gen_cumulative_total(rng, diff, b, rec);
    case Mechanism::quantity_update: return gen_quantity_update(rng, diff, b, rec);
    case Mechanism::refund_or_credit_total: return gen_refund_or_credit_total(rng, diff, b, rec);
    case Mechanism::tiered_discount_total: return gen_tiered_discount_total(rng, diff, b, rec);
    case Mechanism::fee_or_threshold_decision:
      return gen_fee_or_threshold_decision(rng, diff, b, rec);
    case Mechanism::overwrite_final_slot: return gen_overwrite_final_slot(rng, diff, b, rec);
    case Mechanism::schedule_window_resolution:
      return gen_schedule_window_resolution(rng, diff, b, rec);
    case Mechanism::eligibility_decision: return gen_eligibility_decision(rng, diff, b, rec);
    case Mechanism::exclusion_choice: return gen_exclusion_choice(rng, diff, b, rec);
    case Mechanism::bounded_window_selection:
      return gen_bounded_window_selection(rng, diff, b, rec);
  }
  throw std::invalid_argument("generate_record: unknown mechanism");
}

// Gold think text for one state update given the running slot state.
std::string gold_think_text(const StateDelta& delta, std::map<std::string, SlotFold>& slots) {
  auto& s = slots[delta.slot];
  if (delta.kind == DeltaKind::assign) {
    s.total = delta.amount;
    s.value = delta.value;
    s.set = true;
    return delta.slot + " now " + delta.value;
  }
  s.total += delta.amount;
  s.value = format_number(s.total);
  s.set = true;
  return "running " + delta.slot + " " + s.value;
}

}  // namespace

Record generate_record(std::uint64_t seed, Mechanism mechanism, Difficulty difficulty) {
  Rng rng(mix_seed(seed, fnv1a(mechanism_name(mechanism)), static_cast<std::uint64_t>(difficulty)));
  Record rec;
  rec.mechanism = mechanism;
  rec.difficulty = difficulty;
  rec.verifiable = true;

  Builder b;
  run_mechanism(mechanism, rng, difficulty, b, rec);
  closing(rng, b);

  // Adversarial invariant: the early plausible answer must differ from the
  // final one.
  std::vector<StateDelta> deltas;
  for (auto& a : b.anchors) {
    if (a.kind != AnchorKind::state_update) continue;
    deltas.push_back(a.delta);
    a.delta.answer_after = fold_answer(mechanism, deltas);
    deltas.back().answer_after = a.delta.answer_after;
  }
  rec.final_answer = deltas.empty() ? "unknown" : deltas.back().answer_after;
  if (!deltas.empty() && deltas.front().answer_after == rec.final_answer)
    throw std::logic_error("generator produced a non-adversarial record");

  rec.transcript_text = join(b.words, " ");
  std::string spoken = rec.transcript_text;
  spoken[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(spoken[0])));
  rec.tts_text = spoken + ".";
  static const std::vector<const char*> kInstructs = {
      "calm, natural pace", "brisk but clear delivery",
      "casual tone with slight hesitation", "even, friendly pace"};
  rec.tts_instruct = pick_of(rng, kInstructs);

  rec.anchors = b.anchors;
  std::map<std::string, SlotFold> gold_state;
  for (const auto& a : rec.anchors) {
    rec.anchor_words.push_back(b.words[a.word_index]);
    if (a.kind == AnchorKind::pause_filler) {
      rec.logical_actions.emplace_back(rec.anchor_words.back(), "<wait/>");
    } else {
      rec.logical_actions.emplace_back(
          rec.anchor_words.back(),
          "<think>" + gold_think_text(a.delta, gold_state) + "</think>");
    }
  }
  rec.logical_actions.emplace_back(
      "anchor_AUDIO_END", "<think>final answer " + rec.final_answer + "</think><answer>" +
                              rec.final_answer + "</answer>");

  rec.word_durations_ms.reserve(b.words.size());
  for (std::size_t i = 0; i < b.words.size(); ++i)
    rec.word_durations_ms.push_back(rng.uniform_int(200, 500));

  rec.sample_id = std::string(mechanism_name(mechanism)) + "_" + difficulty_name(difficulty) +
                  "_" + std::to_string(seed);
  return rec;
}

std::pair<StreamTimeline, GoldTrace> align_gold_trace(const Record& record, double tick_s,
                                                      double min_window_s) {
  const auto words = tokenize(record.transcript_text);
  if (words.size() != record.word_durations_ms.size())
    throw std::runtime_error("schema-violation: word/duration count mismatch in " +
                             record.sample_id);
  std::vector<WordEvent> events;
  double t = 0.0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const double d = record.word_durations_ms[i] / 1000.0;
    events.push_back({words[i], t, t + d});
    t += d;
  }
  std::vector<AnchorEvent> anchors;
  for (std::size_t i = 0; i < record.anchors.size(); ++i) {
    const auto& spec = record.anchors[i];
    if (spec.word_index >= words.size() ||
        words[spec.word_index] != record.anchor_words[i])
      throw std::runtime_error("schema-violation: anchor word missing from transcript in " +
                               record.sample_id);
    AnchorEvent a;
    a.word_index = spec.word_index;
    a.kind = spec.kind;
    if (spec.kind == AnchorKind::state_update) a.state_delta = spec.delta;
    anchors.push_back(std::move(a));
  }
  auto timeline = make_timeline(std::move(events), std::move(anchors), tick_s, min_window_s);

  GoldTrace gold;
  gold.per_tick.assign(static_cast<std::size_t>(timeline.n_pre_ticks), Action::make_wait());
  std::size_t logical = 0;
  for (const auto& a : timeline.anchors) {
    const auto& entry = record.logical_actions.at(logical++);
    if (a.kind != AnchorKind::state_update) continue;
    if (a.tick >= timeline.n_pre_ticks)
      throw std::runtime_error("schema-violation: anchor past the final listening tick in " +
                               record.sample_id);
    auto parsed = parse(entry.second, timeline);
    if (!parsed.ok() || parsed.trajectory->steps.size() != 1)
      throw std::runtime_error("schema-violation: bad logical action for anchor in " +
                               record.sample_id);
    gold.per_tick[static_cast<std::size_t>(a.tick)] = parsed.trajectory->steps[0].action;
  }
  const auto& audio_end = record.logical_actions.back();
  auto end_parsed = parse(audio_end.second, timeline);
  if (audio_end.first != "anchor_AUDIO_END" || !end_parsed.ok())
    throw std::runtime_error("schema-violation: bad anchor_AUDIO_END in " + record.sample_id);
  bool end_ok = false;
  const auto& tr = *end_parsed.trajectory;
  // One think then one answer, however the grid assigned them.
  std::vector<Action> end_actions;
  for (const auto& s : tr.steps) end_actions.push_back(s.action);
  if (tr.final_think) end_actions.push_back(*tr.final_think);
  if (tr.answer) end_actions.push_back(*tr.answer);
  if (end_actions.size() == 2 && end_actions[0].kind == ActionKind::think &&
      end_actions[1].kind == ActionKind::answer) {
    gold.final_think = end_actions[0];
    gold.answer = end_actions[1];
    end_ok = true;
  }
  if (!end_ok)
    throw std::runtime_error("schema-violation: anchor_AUDIO_END is not think+answer in " +
                             record.sample_id);
  return {std::move(timeline), std::move(gold)};
}

Trajectory gold_trajectory(const StreamTimeline& timeline, const GoldTrace& gold,
                           const std::string& sample_id) {
  Trajectory traj;
  traj.meta.prompt_id = sample_id;
  traj.meta.timeline_id = sample_id;
  for (int k = 0; k < timeline.n_pre_ticks; ++k)
    traj.steps.push_back({k, gold.per_tick[static_cast<std::size_t>(k)]});
  traj.final_think = gold.final_think;
  traj.answer = gold.answer;
  return traj;
}

TaskContext task_context(const Record& record) {
  TaskContext ctx;
  ctx.kind = record.task_kind;
  ctx.gold = record.final_answer;
  ctx.choices = record.choices;
  ctx.difficulty_level = difficulty_level(record.difficulty);
  return ctx;
}

std::vector<std::string> validate_record(const Record& record, double tick_s) {
  std::vector<std::string> errors;
  auto fail = [&](const std::string& msg) { errors.push_back(record.sample_id + ": " + msg); };

  const auto words = tokenize(record.transcript_text);
  if (words.empty()) fail("empty transcript");
  if (words.size() != record.word_durations_ms.size()) fail("word/duration count mismatch");
  if (record.anchors.size() != record.anchor_words.size()) fail("anchor/word list mismatch");
  if (record.logical_actions.size() != record.anchors.size() + 1)
    fail("logical_actions must have one key per anchor plus anchor_AUDIO_END");

  std::set<std::string> seen;
  for (std::size_t i = 0; i < record.anchors.size(); ++i) {
    const auto& a = record.anchors[i];
    if (a.word_index >= words.size()) {
      fail("anchor index out of range");
      continue;
    }
    if (words[a.word_index] != record.anchor_words[i]) fail("anchor word not in transcript");
    if (!seen.insert(record.anchor_words[i]).second) fail("duplicate anchor word");
    if (i < record.logical_actions.size() &&
        record.logical_actions[i].first != record.anchor_words[i])
      fail("logical_actions key order mismatch");
    if (a.kind == AnchorKind::state_update && a.delta.slot.empty())
      fail("state_update anchor without slot");
  }
  if (record.logical_actions.empty() ||
      record.logical_actions.back().first != "anchor_AUDIO_END")
    fail("missing anchor_AUDIO_END");

  std::vector<StateDelta> deltas;
  for (const auto& a : record.anchors) {
    if (a.kind != AnchorKind::state_update) continue;
    deltas.push_back(a.delta);
    const auto expect = fold_answer(record.mechanism, deltas);
    if (a.delta.answer_after != expect)
      fail("answer_after diverges from the state fold (" + a.delta.answer_after +
           " vs " + expect + ")");
  }
  if (!deltas.empty()) {
    if (record.final_answer != deltas.back().answer_after)
      fail("final_answer does not equal the state fold");
    if (record.verifiable && deltas.front().answer_after == record.final_answer)
      fail("early plausible answer equals the final answer");
  }
  if (record.task_kind == TaskKind::multiple_choice) {
    if (record.choices.empty()) fail("multiple_choice without choices");
    else if (std::find(record.choices.begin(), record.choices.end(), record.final_answer) ==
             record.choices.end())
      fail("gold answer not among choices");
  }

  if (errors.empty()) {
    try {
      auto [timeline, gold] = align_gold_trace(record, tick_s);
      std::set<int> update_ticks;
      for (const auto& a : timeline.anchors) {
        if (a.kind == AnchorKind::state_update && !update_ticks.insert(a.tick).second)
          fail("two state updates share one decision tick");
      }
      const auto traj = gold_trajectory(timeline, gold, record.sample_id);
      if (check_protocol(traj, timeline).r_f <= 0.0) fail("gold trace is not protocol-valid");
      const auto& end_tag = record.logical_actions.back().second;
      if (end_tag.find("<answer>" + record.final_answer + "</answer>") == std::string::npos)
        fail("AUDIO_END answer text differs from final_answer");
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  return errors;
}

std::vector<Record> generate_batch(const GenConfig& config, Exec exec) {
  if (config.mechanisms.empty()) throw std::invalid_argument("generate_batch: no mechanisms");
  std::vector<Record> records(static_cast<std::size_t>(config.n_records));
  const auto& mechs = config.mechanisms;
  parallel_for(records.size(), exec, [&](std::size_t i) {
    const auto mech = mechs[i % mechs.size()];
    const auto diff = static_cast<Difficulty>((i / mechs.size()) % 3);
    auto rec = generate_record(mix_seed(config.seed, i), mech, diff);
    rec.sample_id = "r" + std::to_string(i) + "_" + mechanism_name(mech) + "_" +
                    difficulty_name(diff);
    if (config.nonverifiable_fraction > 0.0) {
      Rng flip(mix_seed(config.seed, i, 0x5eedull));
      if (flip.uniform() < config.nonverifiable_fraction) rec.verifiable = false;
    }
    records[i] = std::move(rec);
  });
  return records;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {

using ordered_json = nlohmann::ordered_json;

}  // namespace

std::string record_to_jsonl(const Record& record) {
  ordered_json j;
  j["sample_id"] = record.sample_id;
  j["question_text"] = record.question_text;
  j["tts_text"] = record.tts_text;
  j["tts_instruct"] = record.tts_instruct;
  j["transcript_text"] = record.transcript_text;
  j["anchor_words"] = record.anchor_words;
  ordered_json actions = ordered_json::object();
  for (const auto& [k, v] : record.logical_actions) actions[k] = v;
  j["logical_actions"] = actions;
  j["final_answer"] = record.final_answer;
  j["verifiable"] = record.verifiable;
  j["difficulty"] = difficulty_name(record.difficulty);
  j["task_kind"] = task_kind_name(record.task_kind);
  j["mechanism"] = mechanism_name(record.mechanism);
  j["choices"] = record.choices;
  j["word_durations_ms"] = record.word_durations_ms;
  ordered_json anchors = ordered_json::array();
  for (const auto& a : record.anchors) {
    ordered_json ja;
    ja["word_index"] = a.word_index;
    ja["kind"] = a.kind == AnchorKind::state_update ? "state_update" : "pause_filler";
    if (a.kind == AnchorKind::state_update) {
      ja["delta_kind"] = a.delta.kind == DeltaKind::assign ? "assign" : "add";
      ja["slot"] = a.delta.slot;
      ja["value"] = a.delta.value;
      ja["amount"] = a.delta.amount;
      ja["answer_after"] = a.delta.answer_after;
    }
    anchors.push_back(std::move(ja));
  }
  j["anchors"] = anchors;
  return j.dump();
}

Record record_from_jsonl(const std::string& line) {
  const auto j = ordered_json::parse(line);
  Record r;
  r.sample_id = j.at("sample_id").get<std::string>();
  r.question_text = j.at("question_text").get<std::string>();
  r.tts_text = j.at("tts_text").get<std::string>();
  r.tts_instruct = j.at("tts_instruct").get<std::string>();
  r.transcript_text = j.at("transcript_text").get<std::string>();
  r.anchor_words = j.at("anchor_words").get<std::vector<std::string>>();
  for (const auto& [k, v] : j.at("logical_actions").items())
    r.logical_actions.emplace_back(k, v.get<std::string>());
  r.final_answer = j.at("final_answer").get<std::string>();
  r.verifiable = j.at("verifiable").get<bool>();
  r.difficulty = difficulty_from_name(j.at("difficulty").get<std::string>());
  r.task_kind = task_kind_from_name(j.at("task_kind").get<std::string>());
  r.mechanism = mechanism_from_name(j.at("mechanism").get<std::string>());
  r.choices = j.at("choices").get<std::vector<std::string>>();
  r.word_durations_ms = j.at("word_durations_ms").get<std::vector<int>>();
  for (const auto& ja : j.at("anchors")) {
    AnchorSpec a;
    a.word_index = ja.at("word_index").get<std::size_t>();
    a.kind = ja.at("kind").get<std::string>() == "state_update" ? AnchorKind::state_update
                                                                : AnchorKind::pause_filler;
    if (a.kind == AnchorKind::state_update) {
      a.delta.kind =
          ja.at("delta_kind").get<std::string>() == "assign" ? DeltaKind::assign : DeltaKind::add;
      a.delta.slot = ja.at("slot").get<std::string>();
      a.delta.value = ja.at("value").get<std::string>();
      a.delta.amount = ja.at("amount").get<double>();
      a.delta.answer_after = ja.at("answer_after").get<std::string>();
    }
    r.anchors.push_back(std::move(a));
  }
  return r;
}

void write_records(const std::string& path, const std::vector<Record>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);
  for (const auto& r : records) out << record_to_jsonl(r) << "\n";
}

std::vector<Record> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read dataset: " + path);
  std::vector<Record> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_jsonl(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

ExportSummary export_dataset(const std::vector<Record>& records, double train_fraction,
                             const std::string& out_dir) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto errors = validate_record(records[i]);
    if (!errors.empty())
      throw std::runtime_error("schema violation at row " + std::to_string(i) + ": " +
                               errors.front());
  }
  const auto n_train =
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(records.size())));
  std::vector<Record> train(records.begin(),
                            records.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<Record> val(records.begin() + static_cast<std::ptrdiff_t>(n_train), records.end());
  std::vector<Record> dapo;
  for (const auto& r : train) {
    if (r.verifiable) dapo.push_back(r);
  }
  write_records(out_dir + "/sft_train.jsonl", train);
  write_records(out_dir + "/sft_val.jsonl", val);
  write_records(out_dir + "/dapo_train.jsonl", dapo);
  return {static_cast<int>(train.size()), static_cast<int>(val.size()),
          static_cast<int>(dapo.size())};
}

}  // namespace wta
