#include "authorsum/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace authorsum::corpus {

const char* to_string(Section s) {
  switch (s) {
    case Section::HPI: return "HPI";
    case Section::PE: return "PE";
    case Section::AP: return "AP";
  }
  return "?";
}

Section section_from_string(const std::string& s) {
  if (s == "HPI") return Section::HPI;
  if (s == "PE") return Section::PE;
  if (s == "AP" || s == "A&P") return Section::AP;
  throw std::invalid_argument("unknown section: " + s);
}

CorpusConfig CorpusConfig::paper_shaped() {
  CorpusConfig c;
  c.n_train_authors = 62;
  c.n_hospitals = 27;
  c.n_new_authors = 10;
  c.new_author_shared_fraction = 0.6;
  c.counts.train_per_author = 20;
  c.counts.val_per_author = 2;
  c.counts.eval_per_author = 2;
  c.counts.adapt_per_author = 20;
  c.counts.test_adapt_per_author = 70;
  return c;
}

namespace {

// ---- style slot inventories -----------------------------------------------

enum Slot {
  kHpiOpener,
  kHpiNarrative,
  kHpiDuration,
  kHpiCloser,
  kPeGeneral,
  kPeInspection,
  kPePalpation,
  kPeMotion,
  kApAssessment,
  kApPlanA,
  kApPlanB,
  kApFollowup,
  kSlotCount
};

struct SlotInfo {
  Section section;
  bool implicit;  // no transcript evidence, fixed text
};

constexpr SlotInfo kSlotInfo[kSlotCount] = {
    {Section::HPI, false}, {Section::HPI, false}, {Section::HPI, false},
    {Section::HPI, false}, {Section::PE, true},   {Section::PE, true},
    {Section::PE, false},  {Section::PE, true},   {Section::AP, false},
    {Section::AP, true},   {Section::AP, true},   {Section::AP, true},
};

const std::vector<std::string> kSlotOptions[kSlotCount] = {
    // HPI opener
    {"{name} is a pleasant {age} year old {gender} who presents today with {side_part} {complaint}",
     "{name} is a {age} year old {gender} presenting for evaluation of {side_part} {complaint}",
     "the patient is a {age} year old {gender} who returns with {side_part} {complaint}",
     "patient presents today for evaluation of {side_part} {complaint}",
     "this is a {age} year old {gender} seen in clinic for {side_part} {complaint}",
     "chief complaint today is {side_part} {complaint}"},
    // HPI narrative
    {"{subj} reports the {complaint} began after {cause}",
     "the {complaint} started following {cause} and has persisted",
     "{subj} states the symptoms developed after {cause}",
     "onset occurred in the setting of {cause}",
     "{subj} attributes the {complaint} to {cause}",
     "the history is notable for {cause} preceding the {complaint}"},
    // HPI duration
    {"symptoms have been present for {duration}",
     "{subj} has had {complaint} for roughly {duration}",
     "the {complaint} has lasted about {duration}",
     "duration of symptoms is approximately {duration}",
     "{subj} notes {duration} of ongoing symptoms",
     "this has been going on for {duration}"},
    // HPI closer
    {"{subj} denies any numbness or tingling",
     "{subj} has tried rest and over the counter medication without lasting relief",
     "the {complaint} is described as {severity} and worse with activity",
     "no prior injuries to this area are reported",
     "{subj} remains active despite the symptoms",
     "the symptoms are {severity} and interfere with daily activities"},
    // PE general (implicit)
    {"patient is alert and oriented x3",
     "the patient is in no acute distress",
     "vital signs were reviewed and are stable",
     "patient is well appearing and cooperative",
     "alert and cooperative throughout the exam",
     "general appearance is unremarkable today"},
    // PE inspection (implicit)
    {"no erythema or ecchymosis is observed",
     "mild swelling is noted on inspection",
     "skin is intact without lesions",
     "no gross deformity is appreciated",
     "inspection reveals symmetric musculature",
     "there are no surgical scars visible"},
    // PE palpation (condition-derived)
    {"there is tenderness to palpation over the {side_part}",
     "palpation reveals focal tenderness along the {side_part}",
     "the {side_part} is tender to palpation",
     "focal tenderness is noted over the {side_part}",
     "palpation of the {side_part} elicits discomfort",
     "examination of the {side_part} reveals localized tenderness"},
    // PE motion (implicit)
    {"range of motion is grossly intact",
     "strength is five out of five throughout",
     "neurovascularly intact distally",
     "sensation is intact to light touch",
     "reflexes are symmetric and normal",
     "gait is within normal limits"},
    // AP assessment (condition-derived)
    {"impression is {side_part} {complaint}",
     "assessment today is {side_part} {complaint} {severity} in degree",
     "the working diagnosis is {side_part} {complaint}",
     "clinical picture is consistent with {side_part} {complaint}",
     "findings are compatible with {side_part} {complaint}",
     "diagnosis remains {side_part} {complaint}"},
    // AP plan a (implicit)
    {"we will continue conservative management with rest and activity modification",
     "a home exercise program was reviewed and demonstrated",
     "risks and benefits of treatment options were discussed at length",
     "anti inflammatory medication was recommended as needed",
     "activity modification and relative rest were advised",
     "conservative measures will be continued for now"},
    // AP plan b (implicit)
    {"the plan was discussed and the patient agrees to proceed",
     "we reviewed the treatment plan and all questions were answered",
     "the patient verbalized understanding of the plan",
     "shared decision making was used to finalize the plan",
     "the patient is agreeable to the outlined plan",
     "written instructions were provided for reference"},
    // AP followup (implicit)
    {"the patient will call the office with any worsening symptoms",
     "follow up in clinic as needed otherwise",
     "we will reassess at the next scheduled visit",
     "return precautions were reviewed with the patient",
     "a recheck will be scheduled in several weeks",
     "routine follow up was arranged at the front desk"},
};

const std::vector<TriggerRule> kTriggerPool = {
    {"three month populate smith check", Section::AP,
     "the patient will follow up with john smith np c in 3 months to review progress"},
    {"add cortisone injection follow up", Section::AP,
     "the patient will return after injection for reassessment"},
    {"standard therapy referral spiel", Section::AP,
     "a referral to physical therapy was placed for evaluation and treatment"},
    {"usual imaging order note", Section::AP,
     "we will obtain an mri of the affected area and review results at the next visit"},
    {"routine work status line", Section::AP,
     "a work status note was provided restricting heavy lifting until cleared"},
    {"ice and elevate speech", Section::AP,
     "the patient was instructed to ice and elevate the affected area twice daily"},
    {"brace fitting blurb", Section::PE,
     "the patient was fitted with a supportive brace in clinic today"},
    {"six week recheck line", Section::AP,
     "a recheck appointment will be scheduled in 6 weeks"},
};

// ---- conversation inventories ----------------------------------------------

const std::vector<std::string> kSmalltalk = {
    "how about this weather we have been having",
    "did you catch the game last night",
    "how was the drive over here today",
    "the grandkids kept me busy all weekend",
    "that parking lot is getting worse every month",
    "are you still enjoying the new house",
    "we finally got some rain this week",
    "how is the family doing these days",
};

const std::vector<std::string> kDoctorOpeners = {
    "okay {name} is a pleasant {age} year old {gender} here for {side_part} {complaint}",
    "so we have {name} {age} years old with {side_part} {complaint}",
    "alright {name} {age} year old {gender} today with {side_part} {complaint}",
};

const std::vector<std::string> kPatientNarratives = {
    "hi doctor my {side_part} has been really bothering me since {cause}",
    "doctor this {side_part} {complaint} started after {cause}",
    "my {side_part} has been acting up ever since {cause}",
    "the {complaint} in my {side_part} began with {cause}",
};

const std::vector<std::string> kPatientDetails = {
    "it started about {duration} ago and it feels {severity}",
    "it has been {duration} now and it is pretty {severity}",
    "i would say it is {severity} and it has gone on for {duration}",
    "for about {duration} it has felt {severity} especially at night",
};

const std::vector<std::string> kExamChatter = {
    "let me take a look at that {part} for a moment",
    "does it hurt when i press right here",
    "okay can you bend it as far as it goes",
    "push against my hand for me",
    "alright that does look a little swollen to me",
};

const std::vector<std::string> kClosings = {
    "alright we will get you taken care of",
    "okay we will go over the plan together",
    "let us get you on the schedule before you leave",
};

const std::vector<std::string> kFillers = {"uh", "um",   "yeah", "well", "okay",
                                           "like", "you", "know", "so",  "right"};

const std::vector<std::string> kNames = {"jane",  "john",   "mary",  "robert",
                                         "linda", "michael", "susan", "david",
                                         "karen", "james",  "emily", "thomas"};
const std::vector<std::string> kParts = {"knee",  "shoulder", "back", "hip",
                                         "elbow", "ankle",    "wrist"};
const std::vector<std::string> kComplaints = {"pain", "stiffness", "swelling",
                                              "soreness"};
const std::vector<std::string> kCauses = {
    "a fall at home",       "a fall on the ice",   "lifting heavy boxes",
    "a long run",           "yard work",           "a minor car accident",
    "overuse at work"};
const std::vector<std::string> kDurations = {"two days",  "five days",
                                             "a week",    "two weeks",
                                             "a month",   "six weeks",
                                             "three months"};
const std::vector<std::string> kSeverities = {"mild", "moderate", "severe",
                                              "sharp", "aching"};

struct Visit {
  std::string name, gender, part, side, complaint, cause, duration, severity;
  int age = 0;
  std::string side_part;
};

Visit sample_visit(Rng& rng) {
  Visit v;
  v.name = rng.pick(kNames);
  v.age = 19 + static_cast<int>(rng.uniform_int(70));
  v.gender = rng.bernoulli(0.5) ? "female" : "male";
  v.part = rng.pick(kParts);
  v.side = (v.part == "back") ? "" : (rng.bernoulli(0.5) ? "left" : "right");
  v.complaint = rng.pick(kComplaints);
  v.cause = rng.pick(kCauses);
  v.duration = rng.pick(kDurations);
  v.severity = rng.pick(kSeverities);
  v.side_part = v.side.empty() ? v.part : v.side + " " + v.part;
  return v;
}

std::string fill(std::string tpl, const Visit& v, PronounMode pronoun) {
  const std::string subj =
      pronoun == PronounMode::neutral ? "the patient"
      : (v.gender == "female" ? "she" : "he");
  auto replace_all = [&tpl](const std::string& key, const std::string& value) {
    std::size_t at = 0;
    while ((at = tpl.find(key, at)) != std::string::npos) {
      tpl.replace(at, key.size(), value);
      at += value.size();
    }
  };
  replace_all("{name}", v.name);
  replace_all("{age}", std::to_string(v.age));
  replace_all("{gender}", v.gender);
  replace_all("{subj}", subj);
  replace_all("{side_part}", v.side_part);
  replace_all("{part}", v.part);
  replace_all("{complaint}", v.complaint);
  replace_all("{cause}", v.cause);
  replace_all("{duration}", v.duration);
  replace_all("{severity}", v.severity);
  return tpl;
}

struct HospitalStyle {
  std::array<int, kSlotCount> slots{};
  std::vector<int> trigger_idx;
  PronounMode pronoun = PronounMode::neutral;
  double smalltalk = 0.3;
};

HospitalStyle hospital_style(std::uint64_t seed, const std::string& hospital) {
  Rng rng = Rng(seed).child("hospital." + hospital);
  HospitalStyle h;
  for (int s = 0; s < kSlotCount; ++s) {
    h.slots[static_cast<std::size_t>(s)] =
        static_cast<int>(rng.uniform_int(kSlotOptions[s].size()));
  }
  std::vector<int> order(kTriggerPool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  rng.shuffle(order);
  h.trigger_idx.assign(order.begin(), order.begin() + 3);
  std::sort(h.trigger_idx.begin(), h.trigger_idx.end());
  h.pronoun = rng.bernoulli(0.5) ? PronounMode::gendered : PronounMode::neutral;
  h.smalltalk = rng.uniform(0.15, 0.55);
  return h;
}

StyleProfile instantiate_profile(const std::string& author,
                                 const std::string& hospital,
                                 const HospitalStyle& base,
                                 double style_divergence, Rng rng) {
  std::array<int, kSlotCount> slots = base.slots;
  // personalize at most 3 of the 12 slots so any two colleagues still
  // share >= half of the inventory
  const int n_personal =
      static_cast<int>(std::lround(style_divergence * 3.0));
  std::vector<int> order(kSlotCount);
  for (int i = 0; i < kSlotCount; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);
  for (int i = 0; i < n_personal; ++i) {
    const int slot = order[static_cast<std::size_t>(i)];
    const auto n_opts = kSlotOptions[slot].size();
    const int shift =
        1 + static_cast<int>(rng.uniform_int(n_opts - 1));
    slots[static_cast<std::size_t>(slot)] =
        (slots[static_cast<std::size_t>(slot)] + shift) %
        static_cast<int>(n_opts);
  }

  StyleProfile p;
  p.author = author;
  p.hospital = hospital;
  p.pronoun_mode = base.pronoun;
  for (int s = 0; s < kSlotCount; ++s) {
    const auto& info = kSlotInfo[s];
    const std::string& textv =
        kSlotOptions[s][static_cast<std::size_t>(slots[static_cast<std::size_t>(s)])];
    if (info.implicit) {
      p.implicit_phrases.push_back({info.section, textv});
    } else {
      p.section_templates[info.section].push_back(textv);
    }
  }
  for (int t : base.trigger_idx)
    p.trigger_lexicon.push_back(kTriggerPool[static_cast<std::size_t>(t)]);
  if (rng.bernoulli(style_divergence * 0.5)) {
    std::vector<int> pool;
    for (int t = 0; t < static_cast<int>(kTriggerPool.size()); ++t) {
      if (std::find(base.trigger_idx.begin(), base.trigger_idx.end(), t) ==
          base.trigger_idx.end()) {
        pool.push_back(t);
      }
    }
    if (!pool.empty()) {
      const int extra = pool[rng.uniform_int(pool.size())];
      p.trigger_lexicon.push_back(kTriggerPool[static_cast<std::size_t>(extra)]);
    }
  }
  p.smalltalk_rate = std::clamp(
      base.smalltalk + style_divergence * rng.uniform(-0.15, 0.15), 0.0, 0.8);
  return p;
}

std::string zero_pad(int n, int width) {
  std::string s = std::to_string(n);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

void append_words(std::vector<std::string>& out, const std::string& sentence) {
  std::istringstream iss(sentence);
  std::string w;
  while (iss >> w) out.push_back(w);
}

}  // namespace

std::vector<StyleProfile> make_profiles(int n_authors, int n_hospitals,
                                        double style_divergence,
                                        std::uint64_t seed) {
  if (n_hospitals < 1) throw std::invalid_argument("n_hospitals must be positive");
  if (n_hospitals > n_authors) {
    throw std::invalid_argument("n_hospitals exceeds n_authors");
  }
  if (style_divergence < 0.0 || style_divergence > 1.0) {
    throw std::invalid_argument("style_divergence must be in [0,1]");
  }
  const Rng base(seed);
  std::vector<StyleProfile> out;
  out.reserve(static_cast<std::size_t>(n_authors));
  for (int i = 0; i < n_authors; ++i) {
    const std::string author = "doc_" + zero_pad(i, 2);
    const std::string hospital = "hospital_" + zero_pad(i % n_hospitals, 2);
    out.push_back(instantiate_profile(
        author, hospital, hospital_style(seed, hospital), style_divergence,
        base.child("author." + author)));
  }
  return out;
}

std::vector<StyleProfile> make_new_author_profiles(
    const std::vector<StyleProfile>& train_profiles, int n_new,
    double shared_fraction, double style_divergence, std::uint64_t seed) {
  if (train_profiles.empty()) throw std::invalid_argument("no training profiles");
  if (n_new < 1) throw std::invalid_argument("n_new must be positive");
  std::vector<std::string> hospitals;
  for (const auto& p : train_profiles) {
    if (std::find(hospitals.begin(), hospitals.end(), p.hospital) ==
        hospitals.end()) {
      hospitals.push_back(p.hospital);
    }
  }
  const int n_shared = static_cast<int>(
      std::lround(shared_fraction * static_cast<double>(n_new)));
  const Rng base(seed);
  std::vector<StyleProfile> out;
  for (int i = 0; i < n_new; ++i) {
    const std::string author = "newdoc_" + zero_pad(i, 2);
    const std::string hospital =
        i < n_shared
            ? hospitals[static_cast<std::size_t>(i) % hospitals.size()]
            : "hospital_new_" + zero_pad(i - n_shared, 2);
    out.push_back(instantiate_profile(
        author, hospital, hospital_style(seed, hospital), style_divergence,
        base.child("new_author." + author)));
  }
  return out;
}

EncounterRecord synth_encounter(const StyleProfile& profile,
                                std::uint64_t seed) {
  Rng rng(seed);
  const Visit visit = sample_visit(rng);

  // transcript segments; trigger phrases bypass the noise channel so the
  // trigger->boilerplate invariant stays exact
  std::vector<std::string> noisy_words;
  std::vector<std::string> clean_words;
  auto add_noisy = [&](const std::string& sentence) {
    append_words(noisy_words, sentence);
  };

  for (int slot = 0; slot < 3; ++slot) {
    if (rng.bernoulli(profile.smalltalk_rate)) add_noisy(rng.pick(kSmalltalk));
  }
  add_noisy(fill(rng.pick(kDoctorOpeners), visit, profile.pronoun_mode));
  add_noisy(fill(rng.pick(kPatientNarratives), visit, profile.pronoun_mode));
  add_noisy(fill(rng.pick(kPatientDetails), visit, profile.pronoun_mode));
  const int n_exam = 1 + static_cast<int>(rng.uniform_int(2));
  for (int i = 0; i < n_exam; ++i) {
    add_noisy(fill(rng.pick(kExamChatter), visit, profile.pronoun_mode));
  }

  // noise channel: seeded word drop / filler substitution
  {
    std::vector<std::string> kept;
    kept.reserve(noisy_words.size());
    for (const auto& w : noisy_words) {
      if (rng.uniform() < profile.noise_rate) {
        if (rng.bernoulli(0.5)) continue;  // drop
        kept.push_back(rng.pick(kFillers));
      } else {
        kept.push_back(w);
      }
    }
    noisy_words = std::move(kept);
  }

  std::vector<const TriggerRule*> fired;
  for (const auto& rule : profile.trigger_lexicon) {
    if (rng.bernoulli(0.5)) {
      fired.push_back(&rule);
      append_words(clean_words, rule.phrase);
    }
  }
  append_words(clean_words, rng.pick(kClosings));

  std::vector<std::string> words = std::move(noisy_words);
  words.insert(words.end(), clean_words.begin(), clean_words.end());

  EncounterRecord rec;
  rec.author = profile.author;
  rec.seed = seed;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) rec.transcript.push_back(' ');
    rec.transcript += words[i];
  }

  // notes: per-section templates + implicit phrases + fired boilerplates
  auto implicit_of = [&](Section s) {
    std::vector<std::string> out;
    for (const auto& ip : profile.implicit_phrases) {
      if (ip.section == s) out.push_back(ip.text);
    }
    return out;
  };
  auto join = [](const std::vector<std::string>& sentences) {
    std::string out;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (i) out.push_back(' ');
      out += sentences[i];
    }
    return out;
  };

  const auto& hpi_t = profile.section_templates.at(Section::HPI);
  std::vector<std::string> hpi;
  for (const auto& t : hpi_t) hpi.push_back(fill(t, visit, profile.pronoun_mode));

  const auto pe_imp = implicit_of(Section::PE);
  const auto& pe_t = profile.section_templates.at(Section::PE);
  std::vector<std::string> pe = {pe_imp[0], pe_imp[1],
                                 fill(pe_t[0], visit, profile.pronoun_mode),
                                 pe_imp[2]};

  const auto ap_imp = implicit_of(Section::AP);
  const auto& ap_t = profile.section_templates.at(Section::AP);
  std::vector<std::string> ap = {fill(ap_t[0], visit, profile.pronoun_mode),
                                 ap_imp[0], ap_imp[1], ap_imp[2]};
  for (const TriggerRule* rule : fired) {
    if (rule->section == Section::PE) pe.push_back(rule->boilerplate);
    if (rule->section == Section::AP) ap.push_back(rule->boilerplate);
    if (rule->section == Section::HPI) hpi.push_back(rule->boilerplate);
  }

  rec.notes[Section::HPI] = join(hpi);
  rec.notes[Section::PE] = join(pe);
  rec.notes[Section::AP] = join(ap);
  return rec;
}

DatasetSplits make_splits(const std::vector<StyleProfile>& profiles,
                          int n_new_authors, const SplitCounts& counts,
                          std::uint64_t seed) {
  if (counts.train_per_author < 1 || counts.val_per_author < 1 ||
      counts.eval_per_author < 1 || counts.adapt_per_author < 1 ||
      counts.test_adapt_per_author < 1) {
    throw std::invalid_argument("split counts must be positive");
  }
  if (n_new_authors < 1 ||
      n_new_authors >= static_cast<int>(profiles.size())) {
    throw std::invalid_argument("new-author count must be in [1, n_profiles)");
  }
  const std::size_t n_train =
      profiles.size() - static_cast<std::size_t>(n_new_authors);
  const Rng base(seed);
  DatasetSplits out;

  auto gen = [&](const StyleProfile& p, const std::string& split, int idx) {
    const std::string id = split + "/" + p.author + "/" + zero_pad(idx, 3);
    EncounterRecord rec = synth_encounter(p, base.child(id).seed());
    rec.id = id;
    return rec;
  };

  for (std::size_t a = 0; a < n_train; ++a) {
    const auto& p = profiles[a];
    out.train_authors.push_back(p.author);
    for (int i = 0; i < counts.train_per_author; ++i)
      out.train.push_back(gen(p, "train", i));
    for (int i = 0; i < counts.val_per_author; ++i)
      out.validation.push_back(gen(p, "validation", i));
    for (int i = 0; i < counts.eval_per_author; ++i)
      out.evaluation.push_back(gen(p, "evaluation", i));
  }
  for (std::size_t a = n_train; a < profiles.size(); ++a) {
    const auto& p = profiles[a];
    out.new_authors.push_back(p.author);
    for (int i = 0; i < counts.adapt_per_author; ++i)
      out.adapt.push_back(gen(p, "adapt", i));
    for (int i = 0; i < counts.test_adapt_per_author; ++i)
      out.test_adapt.push_back(gen(p, "test_adapt", i));
  }
  return out;
}

Corpus build_corpus(const CorpusConfig& config) {
  Corpus c;
  c.profiles = make_profiles(config.n_train_authors, config.n_hospitals,
                             config.style_divergence, config.seed);
  auto fresh = make_new_author_profiles(
      c.profiles, config.n_new_authors, config.new_author_shared_fraction,
      config.style_divergence, config.seed);
  for (auto& p : c.profiles) p.noise_rate = config.noise_rate;
  for (auto& p : fresh) p.noise_rate = config.noise_rate;
  c.profiles.insert(c.profiles.end(), fresh.begin(), fresh.end());
  c.splits = make_splits(c.profiles, config.n_new_authors, config.counts,
                         config.seed);
  return c;
}

std::vector<std::string> all_texts(const DatasetSplits& splits) {
  std::vector<std::string> out;
  auto add = [&](const std::vector<EncounterRecord>& recs) {
    for (const auto& r : recs) {
      out.push_back(r.transcript);
      for (const auto& [s, note] : r.notes) out.push_back(note);
    }
  };
  add(splits.train);
  add(splits.validation);
  add(splits.evaluation);
  add(splits.adapt);
  add(splits.test_adapt);
  return out;
}

namespace {

nlohmann::ordered_json record_to_json(const EncounterRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["author"] = r.author;
  j["seed"] = r.seed;
  j["transcript"] = r.transcript;
  nlohmann::ordered_json notes;
  for (Section s : kAllSections) notes[to_string(s)] = r.notes.at(s);
  j["notes"] = std::move(notes);
  return j;
}

EncounterRecord record_from_json(const nlohmann::json& j) {
  EncounterRecord r;
  r.id = j.at("id").get<std::string>();
  r.author = j.at("author").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.transcript = j.at("transcript").get<std::string>();
  for (Section s : kAllSections) {
    r.notes[s] = j.at("notes").at(to_string(s)).get<std::string>();
  }
  return r;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string records_to_jsonl(const DatasetSplits& splits,
                             std::uint64_t config_hash, std::uint64_t seed) {
  nlohmann::ordered_json meta;
  meta["_meta"] = {{"config_hash", hex64(config_hash)}, {"seed", seed}};
  std::string out = meta.dump() + "\n";
  auto add = [&](const std::vector<EncounterRecord>& recs) {
    for (const auto& r : recs) out += record_to_json(r).dump() + "\n";
  };
  add(splits.train);
  add(splits.validation);
  add(splits.evaluation);
  add(splits.adapt);
  add(splits.test_adapt);
  return out;
}

std::string splits_manifest_json(const DatasetSplits& splits,
                                 std::uint64_t config_hash,
                                 std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["_meta"] = {{"config_hash", hex64(config_hash)}, {"seed", seed}};
  auto ids = [](const std::vector<EncounterRecord>& recs) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& r : recs) a.push_back(r.id);
    return a;
  };
  j["splits"] = {{"train", ids(splits.train)},
                 {"validation", ids(splits.validation)},
                 {"evaluation", ids(splits.evaluation)},
                 {"adapt", ids(splits.adapt)},
                 {"test_adapt", ids(splits.test_adapt)}};
  j["train_authors"] = splits.train_authors;
  j["new_authors"] = splits.new_authors;
  return j.dump(2);
}

DatasetSplits dataset_from_files(const std::string& jsonl_text,
                                 const std::string& manifest_text) {
  std::map<std::string, EncounterRecord> by_id;
  std::istringstream in(jsonl_text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    if (j.contains("_meta")) continue;
    EncounterRecord r = record_from_json(j);
    by_id[r.id] = std::move(r);
  }
  const auto manifest = nlohmann::json::parse(manifest_text);
  DatasetSplits out;
  auto load = [&](const char* name, std::vector<EncounterRecord>& dst) {
    for (const auto& id : manifest.at("splits").at(name)) {
      auto it = by_id.find(id.get<std::string>());
      if (it == by_id.end()) {
        throw std::runtime_error("manifest references missing record " +
                                 id.get<std::string>());
      }
      dst.push_back(it->second);
    }
  };
  load("train", out.train);
  load("validation", out.validation);
  load("evaluation", out.evaluation);
  load("adapt", out.adapt);
  load("test_adapt", out.test_adapt);
  out.train_authors =
      manifest.at("train_authors").get<std::vector<std::string>>();
  out.new_authors = manifest.at("new_authors").get<std::vector<std::string>>();
  return out;
}

}  // namespace authorsum::corpus
