// Copyright 2026 The Shufflestack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "shufflestack/alternating.h"
#include "shufflestack/cost_model.h"
#include "shufflestack/dp_accountant.h"
#include "shufflestack/ikos.h"
#include "shufflestack/ristretto255.h"
#include "shufflestack/tiny_group.h"

namespace shufflestack::cli {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// File system failures; mapped to kExitIo.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Stdout artifact, or a file when --out is given.
void Emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    WriteFile(path, text);
  }
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

// JSON cannot hold infinities; they are written as strings.
Json Real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

// ---------------------------------------------------------------------------
// Scenario parsing.

[[noreturn]] void Bad(const std::string& where, const std::string& why) {
  throw ConfigInvalid(where + ": " + why);
}

void OnlyKeys(const nlohmann::json& j, const std::string& where,
              std::initializer_list<const char*> allowed) {
  if (!j.is_object()) Bad(where, "must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      Bad(where, "unknown key '" + k + "'");
    }
  }
}

uint32_t U32(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<int64_t>() < 0 ||
      v.get<int64_t>() > std::numeric_limits<uint32_t>::max()) {
    Bad(where, "must be a nonnegative 32-bit integer");
  }
  return v.get<uint32_t>();
}

uint64_t U64(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0)) {
    Bad(where, "must be a nonnegative integer");
  }
  return v.get<uint64_t>();
}

double Real01(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number()) Bad(where, "must be a number");
  return v.get<double>();
}

bool Flag(const nlohmann::json& v, const std::string& where) {
  if (!v.is_boolean()) Bad(where, "must be true or false");
  return v.get<bool>();
}

PartyId PartyKey(const std::string& k, const std::string& where) {
  try {
    size_t used = 0;
    const unsigned long v = std::stoul(k, &used);
    if (used == k.size() && v < kServer) return static_cast<PartyId>(v);
  } catch (const std::exception&) {
  }
  Bad(where, "'" + k + "' is not a client id");
}

ProtocolConfig ParseConfig(const nlohmann::json& c) {
  OnlyKeys(c, "config",
           {"n", "h", "w", "ell", "n_dec", "m", "t", "n_shuf", "d", "sigma_rep",
            "shuffle_committees", "gamma", "alpha", "payload_bytes", "challenge"});
  ProtocolConfig cfg;
  auto u = [&](const char* key, uint32_t* dst) {
    if (c.contains(key)) *dst = U32(c[key], std::string("config.") + key);
  };
  for (const char* key : {"n", "n_dec", "m", "t", "n_shuf", "d"}) {
    if (!c.contains(key)) Bad("config", std::string("missing '") + key + "'");
  }
  u("n", &cfg.n);
  u("h", &cfg.h);
  u("w", &cfg.w);
  u("ell", &cfg.ell);
  u("n_dec", &cfg.n_dec);
  u("m", &cfg.m);
  u("t", &cfg.t);
  u("n_shuf", &cfg.n_shuf);
  u("d", &cfg.d);
  u("sigma_rep", &cfg.sigma_rep);
  u("shuffle_committees", &cfg.shuffle_committees);
  u("payload_bytes", &cfg.payload_bytes);
  if (c.contains("gamma")) cfg.gamma = Real01(c["gamma"], "config.gamma");
  if (c.contains("alpha")) cfg.alpha = Real01(c["alpha"], "config.alpha");
  if (c.contains("challenge")) {
    const auto& v = c["challenge"];
    if (v == "fiat_shamir") {
      cfg.challenge = ChallengeMode::kFiatShamir;
    } else if (v == "interactive") {
      cfg.challenge = ChallengeMode::kInteractive;
    } else {
      Bad("config.challenge", "must be \"fiat_shamir\" or \"interactive\"");
    }
  }
  return cfg;
}

Misbehavior ParseMisbehavior(const nlohmann::json& j, const std::string& where) {
  OnlyKeys(j, where,
           {"bad_share", "false_report", "bad_offset", "bad_partial_dec", "bad_shuffle",
            "substitute_input", "go_silent", "malformed"});
  Misbehavior m;
  auto b = [&](const char* key, bool* dst) {
    if (j.contains(key)) *dst = Flag(j[key], where + "." + key);
  };
  b("bad_share", &m.bad_share);
  b("false_report", &m.false_report);
  b("bad_offset", &m.bad_offset);
  b("bad_partial_dec", &m.bad_partial_dec);
  b("bad_shuffle", &m.bad_shuffle);
  b("substitute_input", &m.substitute_input);
  if (j.contains("go_silent")) m.go_silent = U32(j["go_silent"], where + ".go_silent");
  if (j.contains("malformed")) m.malformed = U32(j["malformed"], where + ".malformed");
  return m;
}

}  // namespace

Scenario ParseScenario(const nlohmann::json& j) {
  OnlyKeys(j, "scenario",
           {"name", "protocol", "group", "config", "inputs", "adversary", "dropouts", "seeds",
            "keep_payloads", "outputs"});
  Scenario s;
  if (j.contains("name")) {
    if (!j["name"].is_string()) Bad("name", "must be a string");
    s.name = j["name"].get<std::string>();
  }
  if (!j.contains("protocol")) Bad("scenario", "missing 'protocol'");
  if (j["protocol"] == "amortized") {
    s.kind = ProtocolKind::kAmortized;
  } else if (j["protocol"] == "alternating") {
    s.kind = ProtocolKind::kAlternating;
  } else {
    Bad("protocol", "must be \"amortized\" or \"alternating\"");
  }
  if (j.contains("group")) {
    if (j["group"] == "ristretto255") {
      s.group = GroupChoice::kRistretto255;
    } else if (j["group"] == "tiny") {
      s.group = GroupChoice::kTiny;
    } else {
      Bad("group", "must be \"ristretto255\" or \"tiny\"");
    }
  }
  if (!j.contains("config")) Bad("scenario", "missing 'config'");
  s.cfg = ParseConfig(j["config"]);
  s.cfg.Validate(s.kind);

  if (!j.contains("inputs") || j["inputs"] == "default") {
    s.inputs = DefaultInputs(s.cfg.n, s.cfg.payload_bytes);
  } else {
    const auto& in = j["inputs"];
    if (!in.is_array() || in.size() != s.cfg.n) {
      Bad("inputs", "must be \"default\" or an array of n hex strings");
    }
    for (size_t i = 0; i < in.size(); ++i) {
      const std::string where = "inputs[" + std::to_string(i) + "]";
      if (!in[i].is_string()) Bad(where, "must be a hex string");
      Bytes b;
      try {
        b = FromHex(in[i].get<std::string>());
      } catch (const std::exception& e) {
        Bad(where, e.what());
      }
      if (b.size() > s.cfg.payload_bytes) Bad(where, "longer than payload_bytes");
      s.inputs.push_back(std::move(b));
    }
  }

  if (j.contains("adversary")) {
    const auto& a = j["adversary"];
    if (!a.is_object()) Bad("adversary", "must map client ids to behaviors");
    for (const auto& [k, v] : a.items()) {
      const PartyId p = PartyKey(k, "adversary");
      if (p >= s.cfg.n) Bad("adversary", "client " + k + " does not exist");
      s.adversary.corrupt[p] = ParseMisbehavior(v, "adversary." + k);
    }
  }
  if (j.contains("dropouts")) {
    const auto& d = j["dropouts"];
    OnlyKeys(d, "dropouts", {"drop_round", "late_rounds"});
    if (d.contains("drop_round")) {
      if (!d["drop_round"].is_object()) Bad("dropouts.drop_round", "must be an object");
      for (const auto& [k, v] : d["drop_round"].items()) {
        const PartyId p = PartyKey(k, "dropouts.drop_round");
        if (p >= s.cfg.n) Bad("dropouts.drop_round", "client " + k + " does not exist");
        s.dropouts.drop_round[p] = U32(v, "dropouts.drop_round." + k);
      }
    }
    if (d.contains("late_rounds")) {
      if (!d["late_rounds"].is_object()) Bad("dropouts.late_rounds", "must be an object");
      for (const auto& [k, v] : d["late_rounds"].items()) {
        const PartyId p = PartyKey(k, "dropouts.late_rounds");
        if (p >= s.cfg.n) Bad("dropouts.late_rounds", "client " + k + " does not exist");
        if (!v.is_array()) Bad("dropouts.late_rounds." + k, "must be an array of rounds");
        for (const auto& r : v) s.dropouts.late_rounds[p].insert(U32(r, "dropouts.late_rounds"));
      }
    }
  }
  if (j.contains("seeds")) {
    const auto& sd = j["seeds"];
    if (!sd.is_array() || sd.empty()) Bad("seeds", "must be a nonempty array");
    for (const auto& v : sd) s.seeds.push_back(U64(v, "seeds"));
  } else {
    s.seeds = {1};
  }
  if (j.contains("keep_payloads")) s.keep_payloads = Flag(j["keep_payloads"], "keep_payloads");
  if (j.contains("outputs")) {
    const auto& o = j["outputs"];
    OnlyKeys(o, "outputs", {"result", "transcript"});
    for (const char* key : {"result", "transcript"}) {
      if (o.contains(key) && !o[key].is_string()) {
        Bad(std::string("outputs.") + key, "must be a path");
      }
    }
    if (o.contains("result")) s.result_path = o["result"].get<std::string>();
    if (o.contains("transcript")) s.transcript_path = o["transcript"].get<std::string>();
  }
  return s;
}

std::pair<uint32_t, uint32_t> GridFor(uint32_t n) {
  uint32_t h = static_cast<uint32_t>(std::sqrt(static_cast<double>(n)));
  while (h > 1 && n % h != 0) --h;
  if (h == 0) h = 1;
  return {h, n / h};
}

namespace {

// ---------------------------------------------------------------------------
// simulate

Json ConfigJson(const ProtocolConfig& c) {
  Json j;
  j["n"] = c.n;
  j["h"] = c.h;
  j["w"] = c.w;
  j["ell"] = c.ell;
  j["n_dec"] = c.n_dec;
  j["m"] = c.m;
  j["t"] = c.t;
  j["n_shuf"] = c.n_shuf;
  j["d"] = c.d;
  j["sigma_rep"] = c.sigma_rep;
  j["shuffle_committees"] = c.shuffle_committees;
  j["gamma"] = c.gamma;
  j["alpha"] = c.alpha;
  j["payload_bytes"] = c.payload_bytes;
  j["challenge"] = c.challenge == ChallengeMode::kInteractive ? "interactive" : "fiat_shamir";
  return j;
}

SimResult SimulateWith(const Scenario& s, uint64_t seed) {
  if (s.group == GroupChoice::kTiny) {
    return Simulate<TinyGroup>(s.kind, s.cfg, s.inputs, s.adversary, s.dropouts, seed,
                               s.keep_payloads);
  }
  return Simulate<Ristretto255>(s.kind, s.cfg, s.inputs, s.adversary, s.dropouts, seed,
                                s.keep_payloads);
}

bool SameMultiset(std::vector<Bytes> a, std::vector<Bytes> b, uint32_t payload_bytes) {
  for (auto& x : b) x.resize(payload_bytes, 0);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

int CmdSimulate(const std::string& scenario_path, const std::string& out_dir,
                std::ostream& out) {
  const std::string text = ReadFile(scenario_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigInvalid(std::string("scenario is not valid JSON: ") + e.what());
  }
  const Scenario s = ParseScenario(j);

  Json result;
  result["scenario"] = s.name;
  result["protocol"] = ProtocolName(s.kind);
  result["group"] = s.group == GroupChoice::kTiny ? "tiny" : "ristretto255";
  result["config"] = ConfigJson(s.cfg);
  Json runs = Json::array();
  std::ostringstream transcript;
  std::map<std::string, uint64_t> outcomes = {{"ok", 0}, {"abort", 0}, {"bottom", 0}};
  bool all_recovered = true;
  for (uint64_t seed : s.seeds) {
    const SimResult r = SimulateWith(s, seed);
    Json run;
    run["seed"] = seed;
    const Json fields = SimResultJson(r);
    for (const auto& [k, v] : fields.items()) run[k] = v;
    const bool recovered =
        r.outcome == Outcome::kOk && SameMultiset(r.output, s.inputs, s.cfg.payload_bytes);
    run["inputs_recovered"] = recovered;
    all_recovered = all_recovered && recovered;
    ++outcomes[OutcomeName(r.outcome)];
    runs.push_back(std::move(run));
    for (const auto& m : r.transcript) {
      Json line;
      line["seed"] = seed;
      line["round"] = m.round;
      line["from"] = PartyName(m.from);
      line["to"] = PartyName(m.to);
      line["type"] = MsgTypeName(m.type);
      line["size"] = m.size;
      line["arrived_late"] = m.arrived_late;
      line["malformed"] = m.malformed;
      line["discarded"] = m.discarded;
      if (s.keep_payloads) line["payload"] = ToHex(m.payload);
      transcript << line.dump() << "\n";
    }
  }
  result["runs"] = std::move(runs);
  Json summary;
  summary["runs"] = s.seeds.size();
  for (const auto& [k, v] : outcomes) summary[k] = v;
  summary["all_inputs_recovered"] = all_recovered;
  result["summary"] = summary;

  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const fs::path result_path = dir / s.result_path;
  const fs::path transcript_path = dir / s.transcript_path;
  WriteFile(result_path, Dump(result));
  WriteFile(transcript_path, transcript.str());
  out << Dump(summary);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bounds

struct BoundArgs {
  std::string kind;
  double eps0 = 1, delta = 1e-6, delta_prime = -1, delta_w = 1e-6, delta_h = 1e-6;
  double gamma = 0;
  uint64_t n = 0, h = 1000, w = 1000;
  uint32_t m = 3;
  double q = 0;
  bool evaluate_only = false;
  std::string out;
};

Json ChainJson(const AmpChain& c) {
  Json j;
  j["eps0"] = c.eps0;
  j["delta"] = c.delta;
  j["delta_prime"] = c.delta_prime;
  j["h"] = c.h;
  j["w"] = c.w;
  j["column_posterior"] = c.gamma;
  j["eps_clones"] = c.eps_s;
  j["eps_subsampled"] = c.eps_c;
  j["eps_total"] = c.eps_total;
  j["delta_total"] = c.delta_total;
  j["in_domain"] = c.in_domain;
  return j;
}

Json BoundJson(const PrivacyBound& b) {
  Json j;
  j["eps"] = Real(b.eps);
  j["delta"] = b.delta;
  j["source"] = b.source;
  return j;
}

int CmdBounds(const BoundArgs& a, std::ostream& out) {
  const Domain domain = a.evaluate_only ? Domain::kEvaluateOnly : Domain::kEnforce;
  const double delta_prime = a.delta_prime < 0 ? a.delta : a.delta_prime;
  Json j;
  j["kind"] = a.kind;
  if (a.kind == "sampling") {
    j["bound"] = BoundJson({EpsSampling(a.eps0, a.gamma), 0, "sampling"});
    j["trace"] = {{"eps0", a.eps0}, {"gamma", a.gamma}};
  } else if (a.kind == "clones") {
    if (a.n == 0) throw ConfigInvalid("clones needs --n");
    j["bound"] = BoundJson({EpsClones(a.eps0, a.delta, a.n, domain), a.delta, "clones"});
    j["trace"] = {{"eps0", a.eps0},
                  {"delta", a.delta},
                  {"n", a.n},
                  {"max_eps0", Real(EpsClonesMaxEps0(a.delta, a.n))}};
  } else if (a.kind == "weak_amp") {
    uint64_t h = a.h, w = a.w;
    if (a.n) {
      const auto k = static_cast<uint64_t>(std::llround(std::sqrt(static_cast<double>(a.n))));
      if (k * k != a.n) throw NotSquare("n = " + std::to_string(a.n) + " is not a perfect square");
      h = w = k;
    }
    AmpChain chain;
    j["bound"] = BoundJson(WeakAmp(a.eps0, a.delta, delta_prime, h, w, &chain, domain));
    j["trace"] = ChainJson(chain);
  } else if (a.kind == "weak_amp_corrupted") {
    AmpChain chain;
    CorruptedGrid grid;
    j["bound"] = BoundJson(WeakAmpCorrupted(a.eps0, a.delta, a.delta_w, a.delta_h, delta_prime,
                                            a.h, a.w, a.gamma, &chain, &grid, domain));
    Json t = ChainJson(chain);
    t["honest_rows_real"] = grid.h_real;
    t["honest_columns_real"] = grid.w_real;
    t["delta_w"] = a.delta_w;
    t["delta_h"] = a.delta_h;
    t["gamma"] = a.gamma;
    j["trace"] = t;
  } else if (a.kind == "ikos" || a.kind == "ikos_corrupted") {
    if (a.n == 0 || a.q == 0) throw ConfigInvalid(a.kind + " needs --n and --q");
    const double sigma = a.kind == "ikos" ? SigmaIkos(a.n, a.m, a.q)
                                          : SigmaIkosCorrupted(a.n, a.m, a.q, a.gamma);
    j["sigma"] = Real(sigma);
    Json t = {{"n", a.n}, {"m", a.m}, {"q", a.q}};
    if (a.kind == "ikos_corrupted") {
      t["gamma"] = a.gamma;
      t["honest_row"] = IkosHonestRow(a.n, a.gamma, sigma);
    }
    j["trace"] = t;
  }
  Emit(Dump(j), a.out, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// attack

struct AttackArgs {
  std::string kind;
  uint32_t n = 4, k = 4;
  double eps0 = std::log(1000.0);
  uint64_t trials = 100000, seed = 1;
  std::string target = "alternating";
  std::string out;
};

int CmdAttack(const AttackArgs& a, std::ostream& out) {
  Json j;
  j["kind"] = a.kind;
  j["seed"] = a.seed;
  j["trials"] = a.trials;
  const Rng rng(a.seed);
  if (a.kind == "not_do") {
    const auto target =
        a.target == "uniform" ? NotDoTarget::kUniform : NotDoTarget::kAlternating;
    const auto r = AttackNotDo(a.n, a.trials, rng, target);
    j["n"] = r.n;
    j["target"] = a.target;
    j["success"] = r.success;
    j["std_err"] = r.std_err;
    j["decided"] = r.decided;
    j["exact_success"] = target == NotDoTarget::kAlternating ? NotDoExactSuccess(a.n) : 0.5;
  } else {
    const auto r = AttackNoStrongAmp(a.k, a.eps0, a.trials, rng);
    j["k"] = r.k;
    j["eps0"] = r.eps0;
    j["p_event_d0"] = r.estimate.p_a;
    j["p_event_d1"] = r.estimate.p_b;
    j["gap"] = r.gap();
    j["std_err"] = r.estimate.std_err;
    j["ci_low"] = r.estimate.ci_low;
    j["ci_high"] = r.estimate.ci_high;
  }
  Emit(Dump(j), a.out, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// costs

struct CostArgs {
  std::vector<uint32_t> ns = {10000};
  std::string protocol = "both";
  double sigma = 40, eta = 10, gamma = 0.05, alpha = 0.05;
  std::string objective = "rounds", tail = "exact", backend = "bayer_groth";
  std::string challenge = "interactive";
  uint32_t ell = 2;
  bool full_partition = false, detail = false;
  std::string out;
};

std::string Fixed(double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int CmdCosts(const CostArgs& a, std::ostream& out) {
  static const std::map<std::string, Objective> kObjectives = {
      {"rounds", Objective::kRounds},
      {"worst_bytes", Objective::kWorstBytes},
      {"avg_bytes", Objective::kAvgBytes}};
  static const std::map<std::string, TailBound> kTails = {
      {"hoeffding", TailBound::kHoeffding},
      {"chernoff", TailBound::kChernoff},
      {"exact", TailBound::kExactBinomial}};
  OptimizeOptions opt;
  opt.objective = kObjectives.at(a.objective);
  opt.tail = kTails.at(a.tail);
  opt.full_partition = a.full_partition;

  std::vector<ProtocolKind> kinds;
  if (a.protocol != "alternating") kinds.push_back(ProtocolKind::kAmortized);
  if (a.protocol != "amortized") kinds.push_back(ProtocolKind::kAlternating);

  std::ostringstream csv;
  csv << "n,protocol,sigma,eta,rounds_best,rounds_worst,bytes_worst,bytes_avg";
  if (a.detail) csv << ",n_dec,m,t,n_shuf,d,h,w,ell";
  csv << "\n";
  for (uint32_t n : a.ns) {
    for (ProtocolKind kind : kinds) {
      CostParams base;
      base.cfg.n = n;
      base.cfg.gamma = a.gamma;
      base.cfg.alpha = a.alpha;
      base.cfg.challenge =
          a.challenge == "interactive" ? ChallengeMode::kInteractive : ChallengeMode::kFiatShamir;
      base.backend =
          a.backend == "cut_and_choose" ? ProofBackend::kCutAndChoose : ProofBackend::kBayerGroth;
      if (kind == ProtocolKind::kAlternating) {
        std::tie(base.cfg.h, base.cfg.w) = GridFor(n);
        base.cfg.ell = a.ell;
      }
      const Optimum o = Optimize(base, a.sigma, a.eta, kind, opt);
      const auto& r = o.report;
      const auto& c = o.params.cfg;
      csv << n << "," << ProtocolName(kind) << "," << Fixed(r.sigma, 4) << ","
          << Fixed(r.eta, 4) << "," << r.rounds_best << "," << r.rounds_worst << ","
          << r.bytes_worst_client << "," << Fixed(r.bytes_avg_client, 1);
      if (a.detail) {
        csv << "," << c.n_dec << "," << c.m << "," << c.t << "," << c.n_shuf << "," << c.d
            << "," << c.h << "," << c.w << "," << c.ell;
      }
      csv << "\n";
    }
  }
  Emit(csv.str(), a.out, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// ikos

struct IkosArgs {
  std::string mode;
  uint32_t n = 400, m = 3, runs = 1;
  uint64_t q = 0, seed = 1;
  double eps = 1, corrupt = 0;
  std::vector<uint64_t> xs, ys;
  std::string out;
};

int CmdIkos(const IkosArgs& a, std::ostream& out) {
  Json j;
  j["mode"] = a.mode;
  if (a.mode == "sum") {
    const uint64_t q = a.q ? a.q : 1000003;
    ExactSqrt(a.n);
    Rng rng(a.seed);
    Rng inputs = rng.Fork("cli-ikos-inputs");
    Rng adversary = rng.Fork("cli-ikos-adversary");
    // Corrupt clients submit arbitrary shares; their contribution is
    // whatever those shares sum to.
    std::vector<std::vector<uint64_t>> shares(a.n);
    uint64_t expected = 0, corrupted = 0;
    Rng split = rng.Fork("cli-ikos-split");
    for (uint32_t i = 0; i < a.n; ++i) {
      if (adversary.Bernoulli(a.corrupt)) {
        ++corrupted;
        for (uint32_t s = 0; s < a.m; ++s) {
          shares[i].push_back(adversary.UniformBelow(q));
          expected = (expected + shares[i].back()) % q;
        }
      } else {
        const uint64_t x = inputs.UniformBelow(q);
        expected = (expected + x) % q;
        shares[i] = SplitShares(x, a.m, q, split);
      }
    }
    const IkosView view = IkosViewFromShares(shares, q, rng.Fork("cli-ikos-view"));
    j["n"] = a.n;
    j["m"] = a.m;
    j["q"] = q;
    j["seed"] = a.seed;
    j["corrupted"] = corrupted;
    j["expected_sum"] = expected;
    j["view_sum"] = view.Sum();
    j["exact"] = view.Sum() == expected;
  } else if (a.mode == "distance") {
    if (a.q == 0) throw ConfigInvalid("distance needs --q");
    j["xs"] = a.xs;
    j["ys"] = a.ys;
    j["m"] = a.m;
    j["q"] = a.q;
    j["distance"] = IkosViewDistance(a.xs, a.ys, a.m, a.q);
  } else {
    Rng rng(a.seed);
    Rng inputs = rng.Fork("cli-dp-sum-inputs");
    double mse = 0, quant = 0;
    Json per_run = Json::array();
    for (uint32_t r = 0; r < a.runs; ++r) {
      std::vector<double> reals(a.n);
      for (auto& x : reals) x = inputs.Uniform01();
      const DpSumResult res = DpSum(reals, a.eps, a.m, rng.Fork("cli-dp-sum", r).NextU64());
      mse += res.squared_error;
      quant = std::max(quant, res.quantization_error);
      per_run.push_back({{"true_sum", res.true_sum},
                         {"noisy_sum", res.noisy_sum},
                         {"quantized_sum", res.quantized_sum},
                         {"noise", res.noise}});
      j["q"] = res.q;
      j["bits_per_message"] = res.bits_per_message;
    }
    j["n"] = a.n;
    j["eps"] = Real(a.eps);
    j["m"] = a.m;
    j["runs"] = a.runs;
    j["mse"] = mse / a.runs;
    j["noise_variance"] = std::isinf(a.eps) ? 0.0 : DpSumNoiseVariance(a.n, a.eps);
    j["max_quantization_error"] = quant;
    j["per_run"] = per_run;
  }
  Emit(Dump(j), a.out, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleArgs {
  std::string kind;
  uint32_t h = 2, w = 2, ell = 2, n = 4;
  std::vector<uint32_t> public_perm;
  std::string out;
};

int CmdOracle(const OracleArgs& a, std::ostream& out) {
  Json j;
  j["kind"] = a.kind;
  if (a.kind == "alternating") {
    const uint32_t n = a.h * a.w;
    const auto dist = EnumerateAsDistribution(n, a.h, a.w, a.ell, a.public_perm);
    j["n"] = n;
    j["h"] = a.h;
    j["w"] = a.w;
    j["ell"] = a.ell;
    j["public_perm"] = a.public_perm;
    j["tvd_to_uniform"] = dist.TvdToUniform();
    j["support"] = dist.Support();
    Json probs = Json::array();
    for (uint64_t r = 0; r < dist.size(); ++r) {
      if (dist[r] > 0) probs.push_back({{"perm", UnrankPermutation(r, n)}, {"p", dist[r]}});
    }
    j["distribution"] = probs;
  } else {
    j["n"] = a.n;
    j["exact_success"] = NotDoExactSuccess(a.n);
  }
  Emit(Dump(j), a.out, out);
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Secure shuffling protocol toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string scenario, out_dir = ".";
  auto* sim = app.add_subcommand("simulate", "Run a scenario file through the simulator");
  sim->add_option("scenario", scenario, "Scenario JSON file")->required();
  sim->add_option("--out-dir", out_dir, "Directory for the result and transcript files");

  BoundArgs b;
  auto* bounds = app.add_subcommand("bounds", "Evaluate a privacy or summation bound");
  bounds->add_option("kind", b.kind)
      ->required()
      ->check(CLI::IsMember(
          {"sampling", "clones", "weak_amp", "weak_amp_corrupted", "ikos", "ikos_corrupted"}));
  bounds->add_option("--eps0", b.eps0, "Local randomizer epsilon");
  bounds->add_option("--delta", b.delta);
  bounds->add_option("--delta-prime", b.delta_prime, "Composition slack (default: delta)");
  bounds->add_option("--delta-w", b.delta_w);
  bounds->add_option("--delta-h", b.delta_h);
  bounds->add_option("--gamma", b.gamma, "Sampling rate or corrupted fraction");
  bounds->add_option("--n", b.n, "Number of clients");
  bounds->add_option("--rows", b.h, "Grid rows");
  bounds->add_option("--cols", b.w, "Grid columns");
  bounds->add_option("--m", b.m, "Shares per client");
  bounds->add_option("--q", b.q, "Modulus");
  bounds->add_flag("--evaluate-only", b.evaluate_only,
                   "Evaluate outside the bound's domain instead of failing");
  bounds->add_option("-o,--out", b.out, "Write JSON here instead of stdout");

  AttackArgs at;
  double exp_eps0 = 0;
  auto* attack = app.add_subcommand("attack", "Run a distinguishing attack");
  attack->add_option("kind", at.kind)->required()->check(CLI::IsMember({"not_do", "no_strong_amp"}));
  attack->add_option("--n", at.n, "Clients (not_do)");
  attack->add_option("--k", at.k, "Grid side (no_strong_amp)");
  auto* eps_opt = attack->add_option("--eps0", at.eps0, "Randomizer epsilon (no_strong_amp)");
  attack->add_option("--exp-eps0", exp_eps0, "e^eps0 instead of eps0")->excludes(eps_opt);
  attack->add_option("--trials", at.trials);
  attack->add_option("--seed", at.seed);
  attack->add_option("--target", at.target)->check(CLI::IsMember({"alternating", "uniform"}));
  attack->add_option("-o,--out", at.out);

  CostArgs c;
  auto* costs = app.add_subcommand("costs", "Optimize parameters and report predicted costs as CSV");
  costs->add_option("--n", c.ns, "Client counts")->delimiter(',');
  costs->add_option("--protocol", c.protocol)
      ->check(CLI::IsMember({"amortized", "alternating", "both"}));
  costs->add_option("--sigma", c.sigma, "Security target in bits");
  costs->add_option("--eta", c.eta, "Correctness target in bits");
  costs->add_option("--gamma", c.gamma, "Corrupted fraction");
  costs->add_option("--alpha", c.alpha, "Dropout fraction");
  costs->add_option("--objective", c.objective)
      ->check(CLI::IsMember({"rounds", "worst_bytes", "avg_bytes"}));
  costs->add_option("--tail", c.tail)->check(CLI::IsMember({"hoeffding", "chernoff", "exact"}));
  costs->add_option("--backend", c.backend)
      ->check(CLI::IsMember({"bayer_groth", "cut_and_choose"}));
  costs->add_option("--challenge", c.challenge)
      ->check(CLI::IsMember({"interactive", "fiat_shamir"}));
  costs->add_option("--ell", c.ell, "Alternating iterations");
  costs->add_flag("--full-partition", c.full_partition,
                  "Let decryption committees cover every client");
  costs->add_flag("--detail", c.detail, "Append the chosen parameters");
  costs->add_option("-o,--out", c.out);

  IkosArgs ik;
  auto* ikos = app.add_subcommand("ikos", "Split-and-mix summation");
  ikos->add_option("mode", ik.mode)->required()->check(CLI::IsMember({"sum", "distance", "dp_sum"}));
  ikos->add_option("--n", ik.n);
  ikos->add_option("--m", ik.m);
  ikos->add_option("--q", ik.q);
  ikos->add_option("--seed", ik.seed);
  ikos->add_option("--eps", ik.eps);
  ikos->add_option("--runs", ik.runs);
  ikos->add_option("--corrupt", ik.corrupt, "Fraction of clients sending arbitrary shares");
  ikos->add_option("--xs", ik.xs)->delimiter(',');
  ikos->add_option("--ys", ik.ys)->delimiter(',');
  ikos->add_option("-o,--out", ik.out);

  OracleArgs orc;
  auto* oracle = app.add_subcommand("oracle", "Dump exact distributions");
  oracle->add_option("kind", orc.kind)->required()->check(CLI::IsMember({"alternating", "not_do"}));
  oracle->add_option("--rows", orc.h);
  oracle->add_option("--cols", orc.w);
  oracle->add_option("--ell", orc.ell);
  oracle->add_option("--n", orc.n);
  oracle->add_option("--public-perm", orc.public_perm)->delimiter(',');
  oracle->add_option("-o,--out", orc.out);

  std::vector<std::string> argv_store = {"shufflestack"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*sim) return CmdSimulate(scenario, out_dir, out);
    if (*bounds) return CmdBounds(b, out);
    if (*attack) {
      if (exp_eps0 > 0) at.eps0 = std::log(exp_eps0);
      return CmdAttack(at, out);
    }
    if (*costs) return CmdCosts(c, out);
    if (*ikos) return CmdIkos(ik, out);
    if (*oracle) return CmdOracle(orc, out);
  } catch (const IoError& e) {
    err << "error: io: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace shufflestack::cli
