// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion 1-10.
// Usage: acceptance [criterion ...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "pzkpfl/aggregation.hpp"
#include "pzkpfl/codec.hpp"
#include "pzkpfl/groth16.hpp"
#include "pzkpfl/ledger.hpp"
#include "pzkpfl/paillier.hpp"
#include "pzkpfl/piecechain.hpp"
#include "pzkpfl/pipeline.hpp"
#include "pzkpfl/r1cs.hpp"
#include "pzkpfl/trainer.hpp"

namespace {

using namespace pzkpfl;
using algebra::G1;
using algebra::G2;
using algebra::Rng;
using algebra::Scalar;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

const fs::path kSource = PZKPFL_SOURCE_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Scalar nonzero(Rng& rng) {
  for (;;) {
    const Scalar s = Scalar::random(rng);
    if (!s.is_zero()) return s;
  }
}

// Independent oracles ---------------------------------------------------------

// Round-half-away-from-zero division written against lldiv.
int64_t oracle_round_div(int64_t s, int64_t n) {
  const auto d = std::lldiv(s, n);
  int64_t q = d.quot;
  const int64_t r2 = 2 * std::llabs(d.rem);
  if (r2 >= n) q += s < 0 ? -1 : 1;
  return q;
}

struct FloatRun {
  std::vector<double> params;
  std::vector<double> activations;
};

// The logistic step in double: z = b + w.x, sigmoid through the Horner
// expansion acc = 1 + (-z) acc / k, update with learning rate lr.
FloatRun float_logistic(const trainer::Dataset& d, size_t rounds, int order, double lr) {
  FloatRun run;
  run.params.assign(d.features() + 1, 0.0);
  auto& p = run.params;
  for (size_t r = 0; r < rounds; ++r) {
    for (size_t i = 0; i < d.size(); ++i) {
      double z = p.back();
      for (size_t k = 0; k < d.features(); ++k) z += p[k] * d.x[i][k];
      run.activations.push_back(z);
      double acc = 1;
      for (int k = order; k >= 1; --k) acc = 1 + (-z) * acc / k;
      const double err = 1 / (1 + acc) - d.y[i];
      for (size_t k = 0; k < d.features(); ++k) p[k] -= lr * err * d.x[i][k];
      p.back() -= lr * err;
    }
  }
  return run;
}

double horner_sigmoid(double z, int order) {
  double acc = 1;
  for (int k = order; k >= 1; --k) acc = 1 + (-z) * acc / k;
  return 1 / (1 + acc);
}

// Shared state from criterion 1 ----------------------------------------------

struct Run {
  fs::path dir;
  pipeline::RunConfig cfg;
  pipeline::E2EReport report;
  nlohmann::json manifest;
  trainer::Dataset data;
  double seconds = 0;
};

Run& honest_run() {
  static Run run = [] {
    Run r;
    r.dir = fs::temp_directory_path() / "pzkpfl_acceptance";
    fs::remove_all(r.dir);
    r.cfg = pipeline::RunConfig::load(kSource / "configs" / "desk_logistic.json");
    const auto t0 = Clock::now();
    r.report = pipeline::cmd_e2e(r.cfg, r.dir, kSource);
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    std::ifstream in(r.dir / "manifest.json");
    r.manifest = nlohmann::json::parse(in);
    r.data = trainer::load_csv(kSource / r.cfg.dataset);
    return r;
  }();
  return run;
}

groth16::VerificationKey run_vk() {
  return groth16::deserialize_vk(codec::read_file(honest_run().dir / "groth16.vk"));
}

// Criteria --------------------------------------------------------------------

Outcome c1_end_to_end() {
  auto& run = honest_run();
  const auto& rep = run.report;
  const auto& cfg = run.cfg;
  if (!rep.aggregate.ok) return {false, "pipeline failed: " + rep.aggregate.error};

  // Every piece verified under the chain checks (pipeline) and once more here.
  const auto vk = run_vk();
  const std::vector<Scalar> initial(vk.num_public() / 2, Scalar::zero());
  size_t proofs = 0;
  for (uint32_t i = 1; i <= cfg.trainers; ++i) {
    const auto bundles = piecechain::read_archive(run.dir / ("trainer_" + std::to_string(i)) / "bundles.bnda", vk);
    proofs += bundles.size();
    if (bundles.size() != 80) return {false, fmt("trainer %u has %zu bundles", i, bundles.size())};
    const auto cr = piecechain::verify_piece_chain(bundles, vk, initial);
    if (!cr.ok) return {false, fmt("trainer %u piece %llu: %s", i, (unsigned long long)cr.failing_index, cr.reason.c_str())};
  }

  // Direct plaintext-average oracle over independently re-derived local models.
  const auto task = [&] {
    auto t = trainer::logistic_task();
    t.taylor_order = run.manifest.at("taylor_order").get<int>();
    return t;
  }();
  const int rat = run.manifest.at("rat").get<int>();
  const auto split = trainer::split(task, cfg.samples_per_trainer, cfg.rounds, 0, rat);
  std::vector<int64_t> sum(task.params(), 0);
  for (uint32_t i = 0; i < cfg.trainers; ++i) {
    const auto local = run.data.rows(i * cfg.samples_per_trainer, cfg.samples_per_trainer);
    const auto lt = trainer::train_local(task, split, local, cfg.rounds, std::vector<double>(task.params(), 0.0));
    for (size_t k = 0; k < sum.size(); ++k) sum[k] += lt.model.params[k];
  }
  const auto& g = *rep.aggregate.global;
  for (size_t k = 0; k < sum.size(); ++k) {
    if (g.sum[k] != sum[k] || g.mean[k] != oracle_round_div(sum[k], cfg.trainers)) {
      return {false, fmt("slot %zu: global %lld vs oracle %lld", k, (long long)g.mean[k],
                         (long long)oracle_round_div(sum[k], cfg.trainers))};
    }
  }
  const bool ok = rep.aggregate.sum_proof && rep.aggregate.audit && rep.oracle_match && proofs == 240 &&
                  run.seconds < 300;
  return {ok, fmt("%zu proofs, s1/s2/s3 + checkers ok, sum proof %s, audit %s, oracle match bit-exact, %.1f s",
                  proofs, rep.aggregate.sum_proof ? "ok" : "FAILED", rep.aggregate.audit ? "ok" : "FAILED",
                  run.seconds)};
}

Outcome c2_commitment_identity() {
  const auto vk = run_vk();
  const size_t l = vk.num_public();
  Rng rng(2002);
  size_t ok = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Scalar> phi(l);
    piecechain::TList t(l);
    for (auto& v : phi) v = Scalar::random(rng);
    for (auto& v : t) v = Scalar::random(rng);
    const auto m = piecechain::modify(vk, phi, t);
    // Naive products, independent of the library's MSM.
    G1 lhs = m.vk_prime.gamma_abc[0], rhs = vk.gamma_abc[0];
    for (size_t j = 0; j < l; ++j) {
      lhs = lhs + m.vk_prime.gamma_abc[j + 1] * m.phi_prime[j];
      rhs = rhs + vk.gamma_abc[j + 1] * phi[j];
    }
    ok += lhs == rhs && m.phi_prime[0] == phi[0] + t[0];
  }
  return {ok == 1000, fmt("%zu/1000 randomized (statement, noise) pairs satisfy the identity", ok)};
}

Outcome c3_tamper_suite() {
  auto& run = honest_run();
  const auto vk = run_vk();
  const size_t l = vk.num_public();
  auto pk = groth16::deserialize_pk(codec::read_file(run.dir / "groth16.pk"));
  const auto cs = r1cs::ConstraintSystem::deserialize(codec::read_file(run.dir / "circuit.bin"));
  pk.qap = std::make_shared<const r1cs::QapInstance>(r1cs::to_qap(cs));
  pk.prepare();

  // A fresh three-piece honest chain from trainer 1's first pieces.
  auto task = trainer::logistic_task();
  task.taylor_order = run.manifest.at("taylor_order").get<int>();
  const auto split = trainer::split(task, run.cfg.samples_per_trainer, run.cfg.rounds, 0,
                                    run.manifest.at("rat").get<int>());
  const auto lt = trainer::train_local(task, split, run.data.rows(0, run.cfg.samples_per_trainer), run.cfg.rounds,
                                       std::vector<double>(task.params(), 0.0));
  std::vector<piecechain::PieceInput> pieces;
  for (size_t i = 0; i < 3; ++i) {
    const auto asg = r1cs::assign_piece(lt.traces[i]);
    pieces.push_back({asg.statement(l), asg.witness(l)});
  }
  Rng rng(3003);
  const auto chain = piecechain::prove_chain(pk, vk, pieces, rng, {true, 0});
  const std::vector<Scalar> initial(l / 2, Scalar::zero());
  if (!piecechain::verify_piece_chain(chain.bundles, vk, initial).ok) return {false, "honest chain rejected"};
  const auto chain_rejects = [&](const std::vector<piecechain::PieceBundle>& b) {
    return !piecechain::verify_piece_chain(b, vk, initial).ok;
  };

  // Aggregation-side material from the honest run.
  std::vector<aggregation::Submission> subs;
  for (uint32_t i = 1; i <= run.cfg.trainers; ++i) {
    subs.push_back(aggregation::deserialize_submission(
        codec::read_file(run.dir / ("trainer_" + std::to_string(i)) / "submission.bin")));
  }
  const auto slots = run.manifest.at("slots").get<std::vector<uint32_t>>();
  const auto g_pub = aggregation::derive_g_pub(run.cfg.round, codec::from_hex(run.manifest.at("g_pub_nonce").get<std::string>()));
  const auto keys = paillier::deserialize_secret(codec::read_file(run.dir / "publisher" / "paillier.sec"));
  const auto log_bytes = codec::read_file(run.dir / "ledger.log");
  const auto head_hex = [&] {
    auto b = codec::read_file(run.dir / "ledger.head");
    return std::string(b.begin(), b.begin() + 64);
  }();
  ledger::Hash head{};
  const auto hb = codec::from_hex(head_hex);
  std::copy(hb.begin(), hb.end(), head.begin());
  const auto replayed = ledger::Ledger::replay(log_bytes);
  const auto records = replayed.records();
  const auto deploy_tx = ledger::deserialize_tx(records.at(0));
  const std::string address = run.manifest.at("contract").get<std::string>();

  const auto fresh_round = [&](const std::vector<aggregation::Submission>& s) {
    ledger::Ledger led;
    led.deploy(deploy_tx);
    for (size_t i = 0; i < s.size(); ++i) {
      led.invoke(ledger::make_tx(2 + i, aggregation::trainer_name(s[i].trainer), ledger::TxKind::kSubmit, address,
                                 aggregation::serialize(s[i])));
    }
    return led;
  };
  ledger::Ledger closed_round = fresh_round(subs);
  uint64_t next_seq = 100;

  struct Mode {
    const char* name;
    std::function<bool()> trial;  // true when the tamper is rejected
  };
  const auto pick = [&](size_t n) { return static_cast<size_t>(rng.next_u64() % n); };
  std::vector<Mode> modes{
      {"statement slot",
       [&] {
         auto b = chain.bundles;
         b[pick(3)].phi_prime[pick(l)] += nonzero(rng);
         return chain_rejects(b);
       }},
      {"proof component",
       [&] {
         auto b = chain.bundles;
         auto& p = b[pick(3)].proof;
         const Scalar r = nonzero(rng);
         switch (pick(3)) {
           case 0: p.a = p.a + G1::generator() * r; break;
           case 1: p.b = p.b + G2::generator() * r; break;
           default: p.c = p.c + G1::generator() * r; break;
         }
         return chain_rejects(b);
       }},
      {"vk'.gamma_abc_0",
       [&] {
         auto b = chain.bundles;
         auto& g0 = b[pick(3)].vk_prime.gamma_abc[0];
         g0 = g0 + G1::generator() * nonzero(rng);
         return chain_rejects(b);
       }},
      {"tsum1/tsum2",
       [&] {
         auto b = chain.bundles;
         auto& c = b[pick(3)].checkers;
         auto& t = rng.next_u64() % 2 ? c.tsum1 : c.tsum2;
         t = t + G1::generator() * nonzero(rng);
         return chain_rejects(b);
       }},
      {"s1 response",
       [&] {
         auto b = chain.bundles;
         auto& z = b[pick(3)].s1.z;
         z[pick(z.size())] += nonzero(rng);
         return chain_rejects(b);
       }},
      {"s2 cross-noise",
       [&] {
         // Piece k is re-proven with input noise that does not repeat piece k-1's output noise.
         auto b = chain.bundles;
         const size_t k = 1 + pick(2);
         piecechain::TList fake(l);
         for (auto& v : fake) v = Scalar::random(rng);
         const auto g = piecechain::gen_g16_prf(pk, vk, pieces[k].statement, pieces[k].witness, fake, rng);
         const auto con = piecechain::gen_con_prf(vk, g.mod.vk_prime, g.t, g.mod.checkers.tsum1,
                                                  b[k - 1].checkers.tsum2, rng);
         b[k] = {k + 1, g.proof, g.mod.vk_prime, g.mod.phi_prime, g.mod.checkers, con.s1, con.s2};
         const auto rep = piecechain::verify_piece_chain(b, vk, initial);
         return !rep.ok && rep.failing_index == k + 1;
       }},
      {"s3 linkage",
       [&] {
         auto s = subs[pick(subs.size())];
         const size_t j = pick(slots.size());
         switch (pick(4)) {
           case 0: s.a_prime[j] += nonzero(rng); break;
           case 1: s.s3[j].z1 += nonzero(rng); break;
           case 2: s.s3[j].z2 += nonzero(rng); break;
           default: s.C[j] = s.C[j] + G1::generator() * nonzero(rng); break;
         }
         return !aggregation::verify_submission_proofs(s, slots, g_pub);
       }},
      {"ciphertext",
       [&] {
         auto s = subs;
         auto& c = s[pick(s.size())].c[pick(slots.size())];
         const paillier::BigNat delta = 1 + static_cast<unsigned long>(rng.next_u64() % (1ull << 40));
         c = paillier::add(keys.pk, c, paillier::encrypt(keys.pk, delta, rng));
         auto led = fresh_round(s);
         try {
           aggregation::aggregate(led, address, keys, 50);
           return false;
         } catch (const std::runtime_error&) {
           return !led.contract(address).published_sum.has_value();
         }
       }},
      {"contract sum",
       [&] {
         auto sum = honest_run().report.aggregate.global->sum;
         sum[pick(sum.size())] += 1 + static_cast<int64_t>(rng.next_u64() % 1000000);
         codec::Writer w;
         w.u64(sum.size());
         for (auto v : sum) {
           w.i64(v);
           w.i64(aggregation::round_div(v, run.cfg.trainers));
         }
         bool rejected = false;
         try {
           closed_round.invoke(ledger::make_tx(next_seq++, aggregation::kPublisher, ledger::TxKind::kPublishSum,
                                               address, w.take()));
         } catch (const ledger::TxError&) {
           rejected = true;
         }
         return rejected && !aggregation::vrf_sum_prf(subs, slots, g_pub, sum);
       }},
      {"log record",
       [&] {
         auto bad = log_bytes;
         bad[pick(bad.size())] ^= static_cast<uint8_t>(1 + pick(255));
         return !ledger::audit(bad, head);
       }},
  };

  std::ostringstream detail;
  bool all = true;
  for (const auto& m : modes) {
    int rejected = 0;
    for (int t = 0; t < 100; ++t) rejected += m.trial();
    all = all && rejected == 100;
    detail << m.name << " " << rejected << "/100; ";
  }
  auto d = detail.str();
  d.resize(d.size() - 2);
  return {all, d};
}

Outcome c4_mask_cancellation() {
  Rng rng(4004);
  const auto keys = [&] {
    Rng k(4005);
    return paillier::keygen(paillier::modulus_bits(paillier::Profile::kTest), k);
  }();
  size_t ok = 0, total = 0;
  for (size_t n : {1, 2, 3, 5}) {
    for (size_t l : {1, 2, 8}) {
      for (int trial = 0; trial < 100; ++trial, ++total) {
        std::vector<uint32_t> slots(l);
        for (size_t j = 0; j < l; ++j) slots[j] = static_cast<uint32_t>(j + 1);
        const std::vector<uint8_t> nonce{static_cast<uint8_t>(trial), static_cast<uint8_t>(n), static_cast<uint8_t>(l)};
        const auto g_pub = aggregation::derive_g_pub(7, nonce);
        const auto masks = aggregation::exchange_masks(n, l, keys.pk, rng);
        std::vector<int64_t> plain(l, 0);
        std::vector<paillier::Ciphertext> folded(l, paillier::zero());
        for (uint32_t i = 1; i <= n; ++i) {
          aggregation::SubmitInput in;
          in.round = 7;
          in.trainer = i;
          in.slots = slots;
          for (size_t j = 0; j < l; ++j) {
            const int64_t v = static_cast<int64_t>(rng.next_u64() % (1ull << 60)) - (int64_t{1} << 59);
            in.a.push_back(v);
            in.t.push_back(Scalar::random(rng));
            plain[j] += v;
          }
          const auto sub = aggregation::submit(in, masks, keys.pk, g_pub, rng);
          for (size_t j = 0; j < l; ++j) folded[j] = paillier::add(keys.pk, folded[j], sub.c[j]);
        }
        bool match = true;
        for (size_t j = 0; j < l; ++j) {
          const auto m = paillier::decode_signed(keys.pk, paillier::decrypt(keys.sk, keys.pk, folded[j]));
          match = match && m == paillier::BigNat(static_cast<long>(plain[j]));
        }
        ok += match;
      }
    }
  }
  return {ok == total, fmt("%zu/%zu trials exact (100 per (n, l), n in {1,2,3,5}, l in {1,2,8})", ok, total)};
}

Outcome c5_paillier() {
  Rng rng(5005);
  const auto keys = paillier::keygen(paillier::modulus_bits(paillier::Profile::kTest), rng);
  const auto& pk = keys.pk;
  const paillier::BigNat half = (pk.n - 1) / 2;
  const paillier::BigNat quarter = half / 2;
  const auto signed_below = [&](const paillier::BigNat& bound) {
    paillier::BigNat v = paillier::random_below(2 * bound + 1, rng);
    return paillier::BigNat(v - bound);
  };
  size_t ok = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = signed_below(quarter), y = signed_below(quarter);
    const auto c = paillier::add(pk, paillier::encrypt(pk, paillier::encode_signed(pk, x), rng),
                                 paillier::encrypt(pk, paillier::encode_signed(pk, y), rng));
    ok += paillier::decode_signed(pk, paillier::decrypt(keys.sk, pk, c)) == x + y;
  }
  // Capacity violations raise.
  size_t raised = 0, checks = 0;
  for (int i = 0; i < 100; ++i, ++checks) {
    const paillier::BigNat over = half + 1 + paillier::random_below(half, rng);
    try {
      paillier::encode_signed(pk, rng.next_u64() % 2 ? paillier::BigNat(over) : paillier::BigNat(-over));
    } catch (const std::overflow_error&) {
      ++raised;
    }
  }
  ++checks;
  try {
    paillier::check_capacity(pk, 3, pk.n / 6 + 1);
  } catch (const std::overflow_error&) {
    ++raised;
  }
  // A sum that would wrap modulo n is refused at aggregation.
  ++checks;
  {
    Rng r2(5006);
    const auto small = paillier::keygen(40, r2);
    const int64_t big = (int64_t{1} << 38) + 99;
    const std::vector<uint32_t> slots{1};
    const std::vector<uint8_t> nonce{5};
    const auto g_pub = aggregation::derive_g_pub(1, nonce);
    ledger::RoundParams p{1, 3, slots, small.pk, g_pub, 1000};
    ledger::Ledger led;
    const auto addr = led.deploy(ledger::make_tx(1, "owner", ledger::TxKind::kDeploy, "", ledger::serialize(p))).address;
    const auto masks = aggregation::exchange_masks(3, 1, small.pk, r2);
    for (uint32_t i = 1; i <= 3; ++i) {
      const aggregation::SubmitInput in{1, i, slots, {big}, {Scalar::random(r2)}};
      led.invoke(ledger::make_tx(1 + i, aggregation::trainer_name(i), ledger::TxKind::kSubmit, addr,
                                 aggregation::serialize(aggregation::submit(in, masks, small.pk, g_pub, r2))));
    }
    try {
      aggregation::aggregate(led, addr, small, 10);
    } catch (const std::runtime_error& e) {
      raised += std::string(e.what()).find("wrap") != std::string::npos;
    }
  }
  return {ok == 1000 && raised == checks,
          fmt("%zu/1000 signed pairs add exactly; %zu/%zu capacity violations raised", ok, raised, checks)};
}

Outcome c6_fidelity() {
  auto& run = honest_run();
  const int rat = run.manifest.at("rat").get<int>();
  const int order = run.manifest.at("taylor_order").get<int>();
  const double bound = 10 * std::pow(10.0, -rat);
  const auto hold = run.data.rows(run.data.size() - run.cfg.holdout, run.cfg.holdout);
  const auto task = trainer::logistic_task();
  const double lr = static_cast<double>(task.lr.num) / static_cast<double>(task.lr.den);
  double worst_diff = 0, worst_agree = 1;
  for (const auto& tr : run.report.trainers) {
    const auto local = run.data.rows((tr.trainer - 1) * run.cfg.samples_per_trainer, run.cfg.samples_per_trainer);
    const auto fl = float_logistic(local, run.cfg.rounds, order, lr);
    const auto fixed = trainer::decode_params(tr.params, rat);
    for (size_t k = 0; k < fixed.size(); ++k) worst_diff = std::max(worst_diff, std::abs(fixed[k] - fl.params[k]));
    size_t agree = 0;
    for (size_t i = 0; i < hold.size(); ++i) {
      double zi = fixed.back(), zf = fl.params.back();
      for (size_t k = 0; k < hold.features(); ++k) {
        zi += fixed[k] * hold.x[i][k];
        zf += fl.params[k] * hold.x[i][k];
      }
      agree += (zi >= 0) == (zf >= 0);
    }
    worst_agree = std::min(worst_agree, static_cast<double>(agree) / static_cast<double>(hold.size()));
  }
  return {worst_agree >= 0.95 && worst_diff <= bound,
          fmt("held-out agreement >= %.1f%% for every trainer; max |fixed - float| = %.2e (bound %.0e)",
              100 * worst_agree, worst_diff, bound)};
}

Outcome c7_taylor() {
  auto& run = honest_run();
  std::vector<double> points;
  for (int i = -100; i <= 100; ++i) points.push_back(0.5 * i / 100.0);
  const auto approx = quantize::taylor_select("sigmoid", points, 1e-4);
  const auto task = trainer::logistic_task();
  const double lr = static_cast<double>(task.lr.num) / static_cast<double>(task.lr.den);
  double worst = 0, widest = 0;
  for (uint32_t i = 0; i < run.cfg.trainers; ++i) {
    const auto local = run.data.rows(i * run.cfg.samples_per_trainer, run.cfg.samples_per_trainer);
    for (double z : float_logistic(local, run.cfg.rounds, approx.order, lr).activations) {
      worst = std::max(worst, std::abs(horner_sigmoid(z, approx.order) - 1 / (1 + std::exp(-z))));
      widest = std::max(widest, std::abs(z));
    }
  }
  const bool used = run.manifest.at("taylor_order").get<int>() == approx.order;
  return {approx.order <= 5 && worst <= 1e-4 && used,
          fmt("selected order %d over |x| <= 0.5 (point error %.2e); observed |z| <= %.3f, max error %.2e; pipeline %s",
              approx.order, approx.max_error, widest, worst, used ? "uses it" : "uses another order")};
}

Outcome c8_piece_count() {
  const auto reference_scale = trainer::split(trainer::logistic_task(), 75, 1200, 0, 7);
  const auto desk = trainer::split(trainer::logistic_task(), 8, 10, 0, 7);
  const auto desk_r = trainer::split(trainer::regression_task(), 8, 10, 0, 7);
  const bool ok = reference_scale.q == 90'000 && reference_scale.q == 75u * 1200u && desk.q == 80 && desk_r.q == 80 &&
                  reference_scale.steps_per_piece == 1 && desk.steps_per_piece == 1;
  return {ok, fmt("75 x 1200 -> %zu pieces; 8 x 10 -> %zu pieces (logistic), %zu (regression)", reference_scale.q, desk.q,
                  desk_r.q)};
}

Outcome c9_proportionality() {
  const auto task = trainer::regression_task();
  const auto one = r1cs::synthesize_piece(*trainer::split(task, 8, 10, 80, 7).spec).num_constraints();
  const auto two = r1cs::synthesize_piece(*trainer::split(task, 8, 10, 40, 7).spec).num_constraints();
  const double ratio = static_cast<double>(two) / (2.0 * static_cast<double>(one));
  return {std::abs(ratio - 1) <= 0.05,
          fmt("piece size 1: %zu constraints, size 2: %zu; size2 / (2 x size1) = %.4f", one, two, ratio)};
}

Outcome c10_audit() {
  auto& run = honest_run();
  if (!ledger::audit_dir(run.dir)) return {false, "honest log fails audit"};
  const auto log = codec::read_file(run.dir / "ledger.log");
  const auto head_text = codec::read_file(run.dir / "ledger.head");
  ledger::Hash head{};
  const auto hb = codec::from_hex(std::string(head_text.begin(), head_text.begin() + 64));
  std::copy(hb.begin(), hb.end(), head.begin());
  if (ledger::Ledger::replay(log).state_hash() != head) return {false, "replay does not reproduce the state hash"};
  Rng rng(10010);
  size_t detected = 0;
  for (size_t pos = 0; pos < log.size(); ++pos) {
    auto bad = log;
    bad[pos] ^= static_cast<uint8_t>(1 + rng.next_u64() % 255);
    detected += !ledger::audit(bad, head);
  }
  return {detected == log.size(),
          fmt("replay reproduces the state hash; %zu/%zu single-byte mutations detected (every position)", detected,
              log.size())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"end-to-end honest run", c1_end_to_end},
      {"modified-key commitment identity", c2_commitment_identity},
      {"tamper suite", c3_tamper_suite},
      {"mask cancellation", c4_mask_cancellation},
      {"Paillier homomorphism and capacity", c5_paillier},
      {"quantization fidelity", c6_fidelity},
      {"Taylor selection", c7_taylor},
      {"piece-count arithmetic", c8_piece_count},
      {"constraint-count proportionality", c9_proportionality},
      {"ledger audit", c10_audit},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first << "): " << o.detail
              << " [" << fmt("%.1f s", s) << "]" << std::endl;
  }
  return failed ? 1 : 0;
}
