// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "pzkpfl/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "pzkpfl/codec.hpp"
#include "pzkpfl/groth16.hpp"
#include "pzkpfl/ledger.hpp"
#include "pzkpfl/paillier.hpp"
#include "pzkpfl/piecechain.hpp"
#include "pzkpfl/r1cs.hpp"
#include "pzkpfl/trainer.hpp"

namespace pzkpfl::pipeline {
namespace {

using algebra::Rng;
using algebra::Scalar;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

fs::path trainer_dir(const fs::path& dir, uint32_t i) { return dir / ("trainer_" + std::to_string(i)); }
fs::path mailbox_file(const fs::path& dir, uint32_t from, uint32_t to) {
  return dir / "mailbox" / ("mask_" + std::to_string(from) + "_to_" + std::to_string(to) + ".bin");
}

Rng base_rng(const RunConfig& cfg) { return cfg.seed ? Rng(*cfg.seed) : Rng(); }

std::vector<uint8_t> encode_masks(uint32_t trainer, std::span<const paillier::BigNat> masks) {
  codec::Writer w;
  codec::write_header(w, "MASK", 1);
  w.u32(trainer);
  w.u64(masks.size());
  for (const auto& m : masks) paillier::write_nat(w, m);
  return w.take();
}

std::vector<paillier::BigNat> decode_masks(const fs::path& path, uint32_t trainer) {
  const auto bytes = codec::read_file(path);
  codec::Reader r(bytes);
  codec::read_header(r, "MASK", 1);
  if (r.u32() != trainer) throw std::runtime_error(path.string() + ": mask file for another trainer");
  std::vector<paillier::BigNat> out(r.count(1u << 20));
  for (auto& m : out) m = paillier::read_nat(r);
  r.expect_done();
  return out;
}

// Everything a role needs, rebuilt from the artifact directory.
struct Context {
  fs::path dir;
  RunConfig cfg;
  Json manifest;
  trainer::Task task;
  trainer::Dataset data;
  trainer::Split split;
  std::vector<int64_t> p0;
  std::vector<uint32_t> slots;
  aggregation::G1 g_pub;
  std::string contract;

  trainer::Dataset local_rows(uint32_t i) const {
    return data.rows((i - 1) * cfg.samples_per_trainer, cfg.samples_per_trainer);
  }
  trainer::Dataset holdout() const { return data.rows(data.size() - cfg.holdout, cfg.holdout); }
  std::vector<double> p0_real() const { return trainer::decode_params(p0, split.spec->rat); }
};

trainer::Task make_task(const RunConfig& cfg, const trainer::Dataset& data) {
  if (cfg.task == "regression") return trainer::regression_task(data.features());
  return trainer::task_by_name(cfg.task);
}

void validate(const RunConfig& cfg, const trainer::Dataset& data, const trainer::Task& task) {
  if (cfg.trainers == 0) throw std::invalid_argument("config: trainers must be positive");
  if (cfg.samples_per_trainer == 0 || cfg.rounds == 0) throw std::invalid_argument("config: samples and rounds must be positive");
  if (data.features() != task.features) throw std::invalid_argument("config: dataset has the wrong feature count for the task");
  if (cfg.trainers * cfg.samples_per_trainer + cfg.holdout > data.size()) {
    throw std::invalid_argument("config: dataset has " + std::to_string(data.size()) + " rows, need " +
                                std::to_string(cfg.trainers * cfg.samples_per_trainer + cfg.holdout));
  }
  if (cfg.rat < 0 || cfg.rat > 9) throw std::invalid_argument("config: rat must be in [0, 9]");
  if (!(cfg.taylor_error > 0)) throw std::invalid_argument("config: taylor_error must be positive");
  if (cfg.paillier_profile != "test" && cfg.paillier_profile != "secure") {
    throw std::invalid_argument("config: paillier_profile must be test or secure");
  }
  if (!cfg.initial_model.empty() && cfg.initial_model.size() != task.params()) {
    throw std::invalid_argument("config: initial_model needs " + std::to_string(task.params()) + " values");
  }
}

Context load_context(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.json")) throw std::runtime_error("no setup artifacts in " + dir.string());
  Context c;
  c.dir = dir;
  c.cfg = RunConfig::from_json(read_json(dir / "config.json"));
  c.manifest = read_json(dir / "manifest.json");
  c.data = trainer::load_csv(c.manifest.at("dataset").get<std::string>());
  c.task = make_task(c.cfg, c.data);
  c.task.taylor_order = c.manifest.at("taylor_order").get<int>();
  c.split = trainer::split(c.task, c.cfg.samples_per_trainer, c.cfg.rounds, c.cfg.pieces, c.manifest.at("rat").get<int>());
  c.p0 = c.manifest.at("initial_model_fixed").get<std::vector<int64_t>>();
  c.slots = c.manifest.at("slots").get<std::vector<uint32_t>>();
  c.g_pub = aggregation::derive_g_pub(c.cfg.round, codec::from_hex(c.manifest.at("g_pub_nonce").get<std::string>()));
  c.contract = c.manifest.at("contract").get<std::string>();
  return c;
}

struct Keys {
  r1cs::ConstraintSystem cs{0};
  groth16::ProvingKey pk;
  groth16::VerificationKey vk;
};

groth16::VerificationKey load_vk(const Context& c) {
  auto vk = groth16::deserialize_vk(codec::read_file(c.dir / "groth16.vk"));
  if (codec::to_hex(vk.circuit_hash) != c.manifest.at("circuit_hash").get<std::string>()) {
    throw std::runtime_error("verification key does not match the manifest circuit");
  }
  return vk;
}

Keys load_keys(const Context& c) {
  Keys k;
  k.cs = r1cs::synthesize_piece(*c.split.spec);
  if (codec::to_hex(k.cs.hash()) != c.manifest.at("circuit_hash").get<std::string>()) {
    throw std::runtime_error("rebuilt circuit does not match the manifest");
  }
  k.vk = load_vk(c);
  k.pk = groth16::deserialize_pk(codec::read_file(c.dir / "groth16.pk"));
  if (k.pk.circuit_hash != k.cs.hash()) throw std::runtime_error("proving key is for another circuit");
  k.pk.qap = std::make_shared<const r1cs::QapInstance>(r1cs::to_qap(k.cs));
  k.pk.prepare();
  return k;
}

std::vector<Scalar> embed_all(std::span<const int64_t> v) {
  std::vector<Scalar> out;
  for (auto x : v) out.push_back(r1cs::embed(x));
  return out;
}

}  // namespace

// ------------------------------------------------------------ config

RunConfig RunConfig::from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected an object");
  const int version = j.value("version", kVersion);
  if (version != kVersion) throw std::invalid_argument("config: unsupported version " + std::to_string(version));
  static const std::vector<std::string> kKnown{
      "version", "task", "dataset", "trainers", "samples_per_trainer", "rounds", "pieces", "holdout", "rat",
      "taylor_error", "paillier_profile", "seed", "workers", "aggregate_statement", "initial_model", "round"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
      throw std::invalid_argument("config: unknown key " + key);
    }
  }
  RunConfig c;
  try {
    c.task = j.value("task", c.task);
    c.dataset = j.value("dataset", c.dataset);
    c.trainers = j.value("trainers", c.trainers);
    c.samples_per_trainer = j.value("samples_per_trainer", c.samples_per_trainer);
    c.rounds = j.value("rounds", c.rounds);
    c.pieces = j.value("pieces", c.pieces);
    c.holdout = j.value("holdout", c.holdout);
    c.rat = j.value("rat", c.rat);
    c.taylor_error = j.value("taylor_error", c.taylor_error);
    c.paillier_profile = j.value("paillier_profile", c.paillier_profile);
    if (j.contains("seed")) c.seed = j["seed"].is_null() ? std::nullopt : std::optional(j["seed"].get<uint64_t>());
    c.workers = j.value("workers", c.workers);
    c.aggregate_statement = j.value("aggregate_statement", c.aggregate_statement);
    c.initial_model = j.value("initial_model", c.initial_model);
    c.round = j.value("round", c.round);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return c;
}

Json RunConfig::to_json() const {
  Json j;
  j["version"] = kVersion;
  j["task"] = task;
  j["dataset"] = dataset;
  j["trainers"] = trainers;
  j["samples_per_trainer"] = samples_per_trainer;
  j["rounds"] = rounds;
  j["pieces"] = pieces;
  j["holdout"] = holdout;
  j["rat"] = rat;
  j["taylor_error"] = taylor_error;
  j["paillier_profile"] = paillier_profile;
  j["seed"] = seed ? Json(*seed) : Json(nullptr);
  j["workers"] = workers;
  j["aggregate_statement"] = aggregate_statement;
  j["initial_model"] = initial_model;
  j["round"] = round;
  return j;
}

RunConfig RunConfig::load(const fs::path& path) { return from_json(read_json(path)); }

std::vector<uint32_t> aggregated_slots(size_t l, bool whole_statement) {
  std::vector<uint32_t> s;
  for (size_t j = whole_statement ? 1 : l / 2 + 1; j <= l; ++j) s.push_back(static_cast<uint32_t>(j));
  return s;
}

// ------------------------------------------------------------ setup

SetupReport cmd_setup(const RunConfig& cfg_in, const fs::path& dir, const fs::path& base) {
  RunConfig cfg = cfg_in;
  fs::path dataset = cfg.dataset;
  if (dataset.is_relative()) dataset = base / dataset;
  const auto data = trainer::load_csv(dataset);
  auto task = make_task(cfg, data);
  validate(cfg, data, task);
  fs::create_directories(dir);
  fs::create_directories(dir / "publisher");
  fs::create_directories(dir / "mailbox");

  SetupReport rep;
  Rng rng = base_rng(cfg).fork("setup");

  // Taylor order over the guarded activation range.
  std::vector<double> points;
  if (task.kind == trainer::TaskKind::kLogistic) {
    for (int i = -100; i <= 100; ++i) points.push_back(task.z_bound * i / 100.0);
    const auto approx = quantize::taylor_select("sigmoid", points, cfg.taylor_error);
    task.taylor_order = approx.order;
    rep.taylor_order = approx.order;
    rep.taylor_max_error = approx.max_error;
  }

  // Float dry run over every trainer's schedule: magnitudes for rat and the
  // activations the approximation will see.
  std::vector<double> p0(task.params(), 0.0);
  if (!cfg.initial_model.empty()) p0 = cfg.initial_model;
  const auto prog = trainer::build_program(task, 1);
  double max_abs = 0;
  for (uint32_t i = 1; i <= cfg.trainers; ++i) {
    const auto rows = data.rows((i - 1) * cfg.samples_per_trainer, cfg.samples_per_trainer);
    std::vector<double> p = p0;
    for (size_t s = 0; s < trainer::total_steps(rows.size(), cfg.rounds); ++s) {
      const size_t k = trainer::sample_of_step(s, rows.size());
      std::vector<double> d = rows.x[k];
      d.push_back(rows.y[k]);
      std::vector<double> v;
      try {
        v = prog.eval(p, d);
      } catch (const std::domain_error& e) {
        throw std::domain_error("trainer " + std::to_string(i) + " step " + std::to_string(s + 1) + ": " + e.what() +
                                " (activation outside the approximation domain)");
      }
      for (double x : v) max_abs = std::max(max_abs, std::abs(x));
      for (const auto& g : prog.guards()) {
        const double a = v[g.node];
        rep.activation_max_error = std::max(
            rep.activation_max_error, std::abs(quantize::taylor_eval("sigmoid", task.taylor_order, a) -
                                               quantize::exact_eval("sigmoid", a)));
      }
      p.clear();
      for (auto o : prog.outputs()) p.push_back(v[o]);
    }
  }
  rep.rat_cap = std::min(trainer::max_safe_rat(max_abs), 9);
  rep.rat = cfg.rat == 0 ? rep.rat_cap : cfg.rat;
  if (rep.rat > rep.rat_cap) {
    throw std::invalid_argument("rat " + std::to_string(rep.rat) + " overflows int64 for magnitudes up to " +
                                std::to_string(max_abs) + "; largest safe value is " + std::to_string(rep.rat_cap));
  }

  const auto t0 = Clock::now();
  const auto sp = trainer::split(task, cfg.samples_per_trainer, cfg.rounds, cfg.pieces, rep.rat);
  const auto cs = r1cs::synthesize_piece(*sp.spec);
  auto qap = std::make_shared<const r1cs::QapInstance>(r1cs::to_qap(cs));
  Rng crs_rng = rng.fork("crs");
  const auto keys = groth16::setup(qap, cs.hash(), crs_rng);
  rep.seconds = seconds_since(t0);
  rep.constraints = cs.num_constraints();
  rep.statement_size = sp.spec->statement_size();
  rep.pieces = sp.q;
  rep.steps_per_piece = sp.steps_per_piece;
  codec::write_file(dir / "circuit.bin", cs.serialize());
  codec::write_file(dir / "groth16.pk", groth16::serialize(keys.pk));
  codec::write_file(dir / "groth16.vk", groth16::serialize(keys.vk));

  const unsigned bits = paillier::modulus_bits(cfg.paillier_profile == "secure" ? paillier::Profile::kSecure
                                                                               : paillier::Profile::kTest);
  Rng pai_rng = rng.fork("paillier");
  const auto pai = paillier::keygen(bits, pai_rng);
  codec::write_file(dir / "paillier.pub", paillier::serialize(pai.pk));
  codec::write_file(dir / "publisher" / "paillier.sec", paillier::serialize(pai.sk, pai.pk));

  Rng nonce_rng = rng.fork("nonce");
  std::vector<uint8_t> nonce(16);
  for (auto& b : nonce) b = static_cast<uint8_t>(nonce_rng.next_u64());
  const auto slots = aggregated_slots(rep.statement_size, cfg.aggregate_statement);

  ledger::RoundParams params;
  params.round = cfg.round;
  params.trainers = cfg.trainers;
  params.slots = slots;
  params.pk = pai.pk;
  params.g_pub = aggregation::derive_g_pub(cfg.round, nonce);
  params.max_abs = std::numeric_limits<int64_t>::max();
  ledger::Ledger led;
  rep.contract =
      led.deploy(ledger::make_tx(1, aggregation::kPublisher, ledger::TxKind::kDeploy, "", ledger::serialize(params)))
          .address;
  ledger::write_log(dir, led);

  std::vector<int64_t> p0_fixed;
  for (double v : p0) p0_fixed.push_back(quantize::to_fixed(v, rep.rat));

  cfg.dataset = fs::absolute(dataset).lexically_normal().string();
  write_json(dir / "config.json", cfg.to_json());
  Json m;
  m["version"] = 1;
  m["task"] = task.name;
  m["dataset"] = cfg.dataset;
  m["rat"] = rep.rat;
  m["rat_cap"] = rep.rat_cap;
  m["taylor_order"] = task.taylor_order;
  m["pieces"] = sp.q;
  m["steps_per_piece"] = sp.steps_per_piece;
  m["statement_size"] = rep.statement_size;
  m["constraints"] = rep.constraints;
  m["circuit_hash"] = codec::to_hex(cs.hash());
  m["initial_model_fixed"] = p0_fixed;
  m["slots"] = slots;
  m["g_pub_nonce"] = codec::to_hex(nonce);
  m["contract"] = rep.contract;
  write_json(dir / "manifest.json", m);
  write_json(dir / "setup_report.json", to_json(rep));
  return rep;
}

// ------------------------------------------------------------ trainer

void cmd_masks(const fs::path& dir, uint32_t trainer) {
  const auto ctx = load_context(dir);
  if (trainer < 1 || trainer > ctx.cfg.trainers) throw std::invalid_argument("trainer id out of range");
  const auto pk = paillier::deserialize_public(codec::read_file(dir / "paillier.pub"));
  const Rng rng = base_rng(ctx.cfg).fork("trainer", trainer);
  const auto masks = aggregation::draw_masks(trainer, ctx.slots.size(), pk, rng);
  const auto bytes = encode_masks(trainer, masks);
  fs::create_directories(trainer_dir(dir, trainer));
  fs::create_directories(dir / "mailbox");
  codec::write_file(trainer_dir(dir, trainer) / "masks.bin", bytes);
  const uint32_t next = trainer % ctx.cfg.trainers + 1;
  codec::write_file(mailbox_file(dir, trainer, next), bytes);
}

TrainReport cmd_train_prove(const fs::path& dir, uint32_t trainer) {
  const auto ctx = load_context(dir);
  const uint32_t n = ctx.cfg.trainers;
  if (trainer < 1 || trainer > n) throw std::invalid_argument("trainer id out of range");
  const auto tdir = trainer_dir(dir, trainer);
  if (!fs::exists(tdir / "masks.bin")) cmd_masks(dir, trainer);
  const uint32_t prev = trainer == 1 ? n : trainer - 1;
  const auto mailbox = mailbox_file(dir, prev, trainer);
  if (!fs::exists(mailbox)) {
    throw std::runtime_error("waiting for trainer " + std::to_string(prev) + "'s mask in " + mailbox.string() +
                             "; run train-prove --phase masks for every trainer first");
  }
  const auto own = decode_masks(tdir / "masks.bin", trainer);
  const auto pred = decode_masks(mailbox, prev);
  const auto pai = paillier::deserialize_public(codec::read_file(dir / "paillier.pub"));
  const auto keys = load_keys(ctx);
  Rng rng = base_rng(ctx.cfg).fork("trainer", trainer);

  TrainReport rep;
  rep.trainer = trainer;
  const auto local = ctx.local_rows(trainer);
  auto t0 = Clock::now();
  const auto lt = trainer::train_local(ctx.task, ctx.split, local, ctx.cfg.rounds, ctx.p0_real());
  rep.train_seconds = seconds_since(t0);
  rep.pieces = lt.traces.size();
  rep.params = lt.model.params;
  rep.float_params = lt.float_params;

  const int rat = ctx.split.spec->rat;
  const auto fixed_real = trainer::decode_params(rep.params, rat);
  for (size_t k = 0; k < fixed_real.size(); ++k) {
    rep.max_param_diff = std::max(rep.max_param_diff, std::abs(fixed_real[k] - rep.float_params[k]));
  }
  const auto hold = ctx.holdout();
  const auto exact = trainer::train_exact(ctx.task, local, ctx.cfg.rounds, ctx.p0_real());
  rep.accuracy = trainer::accuracy(ctx.task, fixed_real, hold);
  rep.float_accuracy = trainer::accuracy(ctx.task, rep.float_params, hold);
  rep.exact_accuracy = trainer::accuracy(ctx.task, exact, hold);
  rep.agreement = trainer::agreement(ctx.task, fixed_real, rep.float_params, hold);
  rep.exact_agreement = trainer::agreement(ctx.task, fixed_real, exact, hold);
  for (double a : lt.activations) {
    rep.max_activation = std::max(rep.max_activation, std::abs(a));
    rep.activation_max_error =
        std::max(rep.activation_max_error, std::abs(quantize::taylor_eval("sigmoid", ctx.task.taylor_order, a) -
                                                    quantize::exact_eval("sigmoid", a)));
  }
  const double tiny = std::pow(10.0, 1 - rat);
  for (size_t i = 0; i < lt.traces.size(); ++i) {
    const auto in = trainer::decode_params(lt.traces[i].inputs(), rat);
    const auto out = trainer::decode_params(lt.traces[i].outputs(), rat);
    for (size_t k = 0; k < in.size(); ++k) {
      const double fs_step = lt.float_steps[i][k], is_step = out[k] - in[k];
      if (std::abs(fs_step) >= tiny && (fs_step > 0) != (is_step > 0)) ++rep.sign_mismatches;
    }
  }

  const size_t l = ctx.split.spec->statement_size();
  std::vector<piecechain::PieceInput> pieces;
  pieces.reserve(lt.traces.size());
  for (const auto& t : lt.traces) {
    const auto asg = r1cs::assign_piece(t);
    pieces.push_back({asg.statement(l), asg.witness(l)});
  }
  t0 = Clock::now();
  Rng prove_rng = rng.fork("prove");
  const auto chain = piecechain::prove_chain(keys.pk, keys.vk, pieces, prove_rng, {true, ctx.cfg.workers});
  rep.prove_seconds = seconds_since(t0);
  piecechain::write_archive(tdir / "bundles.bnda", chain.bundles, keys.vk);

  aggregation::SubmitInput in;
  in.round = ctx.cfg.round;
  in.trainer = trainer;
  in.slots = ctx.slots;
  const auto last_in = lt.traces.back().inputs();
  for (auto s : ctx.slots) {
    in.a.push_back(s <= l / 2 ? last_in[s - 1] : rep.params[s - 1 - l / 2]);
    in.t.push_back(chain.tlists.back()[s - 1]);
  }
  Rng submit_rng = rng.fork("submit");
  const auto sub = aggregation::submit(in, aggregation::mask_delta(own, pred, pai.n), pai, ctx.g_pub, submit_rng);
  codec::write_file(tdir / "submission.bin", aggregation::serialize(sub));

  Json j = to_json(rep);
  j["submitted"] = in.a;
  write_json(tdir / "report.json", j);
  return rep;
}

// ------------------------------------------------------------ publisher

AggregateReport cmd_verify_aggregate(const fs::path& dir) {
  AggregateReport rep;
  const auto fail = [&](std::string msg) {
    rep.ok = false;
    rep.error = std::move(msg);
    write_json(dir / "report.json", to_json(rep));
    return rep;
  };
  if (!fs::exists(dir) || fs::is_empty(dir)) throw std::runtime_error("output directory " + dir.string() + " is empty");
  const auto ctx = load_context(dir);
  const auto vk = load_vk(ctx);
  const auto hash = vk.circuit_hash;
  const uint32_t n = ctx.cfg.trainers;
  const size_t l = ctx.split.spec->statement_size();
  const auto initial = embed_all(ctx.p0);

  if (!ledger::audit_dir(dir)) return fail("ledger log does not match its published head");
  auto led = ledger::Ledger::replay(codec::read_file(dir / "ledger.log"));

  std::vector<aggregation::Submission> subs(n);
  size_t total_bundles = 0;
  double verify_seconds = 0;
  for (uint32_t i = 1; i <= n; ++i) {
    TrainerStatus st;
    st.trainer = i;
    const auto tdir = trainer_dir(dir, i);
    try {
      const auto bundles = piecechain::read_archive(tdir / "bundles.bnda", vk);
      st.bundles = bundles.size();
      total_bundles += bundles.size();
      if (bundles.size() != ctx.split.q) {
        throw std::runtime_error("expected " + std::to_string(ctx.split.q) + " bundles, found " +
                                 std::to_string(bundles.size()));
      }
      const auto t0 = Clock::now();
      const auto cr = piecechain::verify_piece_chain(bundles, vk, initial, ctx.cfg.workers);
      verify_seconds += seconds_since(t0);
      if (!cr.ok) throw std::runtime_error("piece " + std::to_string(cr.failing_index) + ": " + cr.reason);
      subs[i - 1] = aggregation::deserialize_submission(codec::read_file(tdir / "submission.bin"));
      const auto& sub = subs[i - 1];
      if (sub.trainer != i || sub.round != ctx.cfg.round) throw std::runtime_error("submission has the wrong trainer or round");
      const auto& last = bundles.back().phi_prime;
      if (sub.a_prime.size() != ctx.slots.size()) throw std::runtime_error("submission has the wrong slot count");
      for (size_t j = 0; j < ctx.slots.size(); ++j) {
        if (!(sub.a_prime[j] == last[ctx.slots[j] - 1])) {
          throw std::runtime_error("submitted statement differs from the last proven piece at slot " +
                                   std::to_string(ctx.slots[j]));
        }
      }
      if (!aggregation::verify_submission_proofs(sub, ctx.slots, ctx.g_pub)) throw std::runtime_error("s3 linkage proof rejected");
      st.ok = true;
    } catch (const std::exception& e) {
      st.ok = false;
      st.reason = e.what();
    }
    rep.trainers.push_back(st);
  }
  for (const auto& st : rep.trainers) {
    if (!st.ok) return fail("trainer " + std::to_string(st.trainer) + ": " + st.reason + "; aggregation refused");
  }

  // Trainers post concurrently; the sequencer orders by seq.
  ledger::Sequencer seq;
  const uint64_t base = led.last_seq() + 1;
  {
    std::vector<std::thread> posters;
    for (uint32_t i = 1; i <= n; ++i) {
      posters.emplace_back([&, i] {
        seq.enqueue(ledger::make_tx(base + i - 1, aggregation::trainer_name(i), ledger::TxKind::kSubmit, ctx.contract,
                                    aggregation::serialize(subs[i - 1])));
      });
    }
    for (auto& t : posters) t.join();
  }
  const auto rejected = seq.flush(led);
  if (!rejected.empty()) return fail("contract rejected " + rejected.front().first.sender + ": " + rejected.front().second);

  const auto pai = paillier::deserialize_secret(codec::read_file(dir / "publisher" / "paillier.sec"));
  try {
    rep.global = aggregation::aggregate(led, ctx.contract, pai, led.last_seq() + 1);
  } catch (const std::exception& e) {
    return fail(std::string("aggregation failed: ") + e.what());
  }
  rep.sum_proof = aggregation::vrf_sum_prf(subs, ctx.slots, ctx.g_pub, rep.global->sum);
  ledger::write_log(dir, led);
  rep.audit = cmd_audit(dir);

  const int rat = ctx.split.spec->rat;
  rep.global_params = trainer::decode_params(rep.global->mean, rat);
  if (!ctx.cfg.aggregate_statement) rep.global_accuracy = trainer::accuracy(ctx.task, rep.global_params, ctx.holdout());
  rep.ok = rep.sum_proof && rep.audit;
  if (!rep.sum_proof) rep.error = "sum proof rejected";
  if (!rep.audit) rep.error = "ledger audit failed";

  // Setup, proving and verification cost columns.
  const auto setup = read_json(dir / "setup_report.json");
  double prove_seconds = 0;
  Json accuracy = Json::array();
  for (uint32_t i = 1; i <= n; ++i) {
    const auto tr = read_json(trainer_dir(dir, i) / "report.json");
    prove_seconds += tr.at("prove_seconds").get<double>();
    accuracy.push_back({{"trainer", i},
                        {"integer", tr.at("accuracy")},
                        {"float", tr.at("float_accuracy")},
                        {"exact", tr.at("exact_accuracy")},
                        {"agreement", tr.at("agreement")}});
  }
  groth16::Proof probe;
  Json m;
  m["setup_seconds"] = setup.at("seconds");
  m["proof_count"] = total_bundles;
  m["proof_generation_seconds_per_proof"] = total_bundles ? prove_seconds / total_bundles : 0.0;
  m["proof_verification_seconds_per_proof"] = total_bundles ? verify_seconds / total_bundles : 0.0;
  m["constraint_count"] = ctx.manifest.at("constraints");
  m["statement_size"] = l;
  m["pieces_per_trainer"] = ctx.split.q;
  m["steps_per_piece"] = ctx.split.steps_per_piece;
  m["trainers"] = n;
  m["rat"] = rat;
  m["taylor_order"] = ctx.task.taylor_order;
  m["proving_key_bytes"] = fs::file_size(dir / "groth16.pk");
  m["verification_key_bytes"] = fs::file_size(dir / "groth16.vk");
  m["proof_bytes"] = groth16::serialize(probe, hash).size();
  uint64_t archive_bytes = 0;
  for (uint32_t i = 1; i <= n; ++i) archive_bytes += fs::file_size(trainer_dir(dir, i) / "bundles.bnda");
  m["bundle_archive_bytes"] = archive_bytes;
  m["local_accuracy"] = accuracy;
  m["global_accuracy"] = rep.global_accuracy;
  rep.metrics = m;

  Json g;
  g["slots"] = ctx.slots;
  g["sum"] = rep.global->sum;
  g["count"] = rep.global->count;
  g["mean_fixed"] = rep.global->mean;
  g["remainder"] = rep.global->remainder;
  g["mean"] = rep.global_params;
  g["rat"] = rat;
  write_json(dir / "global.json", g);
  write_json(dir / "metrics.json", m);
  write_json(dir / "report.json", to_json(rep));
  return rep;
}

bool cmd_audit(const fs::path& dir) {
  if (!fs::exists(dir / "ledger.log") || !fs::exists(dir / "ledger.head")) {
    throw std::runtime_error("no ledger.log / ledger.head in " + dir.string());
  }
  return ledger::audit_dir(dir);
}

E2EReport cmd_e2e(const RunConfig& cfg, const fs::path& dir, const fs::path& base) {
  E2EReport rep;
  rep.setup = cmd_setup(cfg, dir, base);
  for (uint32_t i = 1; i <= cfg.trainers; ++i) cmd_masks(dir, i);
  std::vector<std::vector<int64_t>> submitted;
  for (uint32_t i = 1; i <= cfg.trainers; ++i) {
    rep.trainers.push_back(cmd_train_prove(dir, i));
    submitted.push_back(read_json(trainer_dir(dir, i) / "report.json").at("submitted").get<std::vector<int64_t>>());
  }
  rep.aggregate = cmd_verify_aggregate(dir);

  // Oracle: slot-wise plaintext sum of the local models, same rounding rule.
  std::vector<int64_t> sum(submitted.front().size(), 0);
  for (const auto& v : submitted) {
    for (size_t j = 0; j < v.size(); ++j) sum[j] += v[j];
  }
  rep.oracle = aggregation::make_global(sum, cfg.trainers);
  rep.oracle_match = rep.aggregate.global && *rep.aggregate.global == rep.oracle;
  return rep;
}

// ------------------------------------------------------------ reports

Json to_json(const SetupReport& r) {
  return {{"seconds", r.seconds},
          {"constraints", r.constraints},
          {"statement_size", r.statement_size},
          {"pieces", r.pieces},
          {"steps_per_piece", r.steps_per_piece},
          {"rat", r.rat},
          {"rat_cap", r.rat_cap},
          {"taylor_order", r.taylor_order},
          {"taylor_max_error", r.taylor_max_error},
          {"activation_max_error", r.activation_max_error},
          {"contract", r.contract}};
}

Json to_json(const TrainReport& r) {
  return {{"trainer", r.trainer},
          {"pieces", r.pieces},
          {"train_seconds", r.train_seconds},
          {"prove_seconds", r.prove_seconds},
          {"params_fixed", r.params},
          {"float_params", r.float_params},
          {"max_param_diff", r.max_param_diff},
          {"accuracy", r.accuracy},
          {"float_accuracy", r.float_accuracy},
          {"exact_accuracy", r.exact_accuracy},
          {"agreement", r.agreement},
          {"exact_agreement", r.exact_agreement},
          {"max_activation", r.max_activation},
          {"activation_max_error", r.activation_max_error},
          {"sign_mismatches", r.sign_mismatches}};
}

Json to_json(const AggregateReport& r) {
  Json t = Json::array();
  for (const auto& s : r.trainers) {
    t.push_back({{"trainer", s.trainer}, {"ok", s.ok}, {"bundles", s.bundles}, {"reason", s.reason}});
  }
  Json j{{"ok", r.ok}, {"error", r.error}, {"trainers", t}, {"sum_proof", r.sum_proof}, {"audit", r.audit}};
  if (r.global) {
    j["global_sum"] = r.global->sum;
    j["global_mean_fixed"] = r.global->mean;
    j["global_mean"] = r.global_params;
    j["global_accuracy"] = r.global_accuracy;
  }
  return j;
}

}  // namespace pzkpfl::pipeline
