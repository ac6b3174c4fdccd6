// Copyright 2026 The cocur Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cocur: command-line front end.
//
//   cocur synth        generate a labeled synthetic benchmark
//   cocur train-lm     train the general and in-domain language models
//   cocur train-tm     train the noisy translation model and its clean fine-tune
//   cocur score        per-pair domain and denoising scores
//   cocur select       full-dataset selections at configured checkpoints
//   cocur run          the online curriculum, one CSV row per batch
//   cocur em-optimize  EM-style bootstrap of the denoising scorer
//   cocur report       filtering-percentage curves and selection quality
//
// Exit status: 0 success, 1 data or configuration error, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cocur/corpus.hpp"
#include "cocur/diagnostics.hpp"
#include "cocur/em_opt.hpp"
#include "cocur/error.hpp"
#include "cocur/parallel.hpp"
#include "cocur/run_config.hpp"
#include "cocur/synth.hpp"
#include "cocur/text_io.hpp"

namespace fs = std::filesystem;
using namespace cocur;

namespace {

struct CommonArgs {
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
};

struct Overrides {
  std::string kind;
  std::optional<long long> iterations;
  std::optional<long long> em_steps;
  std::optional<long long> max_steps;
  std::string scorer = "both";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.configs, "key = value config file (repeatable, later files win)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "overrides the `seed` key");
  cmd->add_option("--out", args.out, "run directory")->required();
  cmd->add_option("--set", args.sets, "key=value override (repeatable, applied last)");
}

cli::RunConfig resolve(const CommonArgs& args, const Overrides& o) {
  cli::RunConfig rc;
  for (const auto& path : args.configs) rc.merge_file(path);
  if (args.seed) rc.set("seed", std::to_string(*args.seed));
  if (!o.kind.empty()) rc.set("curriculum.kind", o.kind);
  if (o.iterations) rc.set("em.iterations", std::to_string(*o.iterations));
  if (o.em_steps) rc.set("em.steps", std::to_string(*o.em_steps));
  if (o.max_steps) rc.set("curriculum.max_steps", std::to_string(*o.max_steps));
  for (const auto& s : args.sets) rc.set_assignment(s);
  return rc;
}

// models/, logs/, reports/ under the run directory; resolved_config at its root.
struct RunDir {
  fs::path root;

  fs::path models() const { return root / "models"; }
  fs::path logs() const { return root / "logs"; }
  fs::path reports() const { return root / "reports"; }
  fs::path lm_general() const { return models() / "lm_general.txt"; }
  fs::path lm_indomain() const { return models() / "lm_indomain.txt"; }
  fs::path tm_noisy() const { return models() / "tm_noisy.txt"; }
  fs::path tm_clean() const { return models() / "tm_clean.txt"; }
};

RunDir open_run_dir(const std::string& out, const cli::RunConfig& rc) {
  RunDir dir{fs::path(out)};
  std::error_code ec;
  for (const auto& d : {dir.root, dir.models(), dir.logs(), dir.reports()}) {
    fs::create_directories(d, ec);
    if (ec) throw IoError("cannot create " + d.string() + ": " + ec.message());
  }
  text::write_file(dir.root / "resolved_config", rc.resolved());
  return dir;
}

const std::string& required_path(const cli::RunConfig& rc, std::string_view key) {
  const auto& v = rc.get(key);
  if (v.empty()) throw Error(std::string(key) + " is not set");
  return v;
}

Corpus load_background(const cli::RunConfig& rc) {
  auto c = load_parallel(required_path(rc, "data.background_source"), required_path(rc, "data.background_target"),
                         cli::load_options(rc));
  if (const auto& labels = rc.get("data.background_labels"); !labels.empty()) attach_labels(c, labels);
  return c;
}

Corpus load_indomain(const cli::RunConfig& rc) {
  return load_monolingual(required_path(rc, "data.indomain"), cli::load_options(rc));
}

Corpus load_trusted(const cli::RunConfig& rc) {
  return load_parallel(required_path(rc, "data.trusted_source"), required_path(rc, "data.trusted_target"),
                       cli::load_options(rc));
}

std::optional<Corpus> load_heldout(const cli::RunConfig& rc) {
  const auto& s = rc.get("data.heldout_source");
  const auto& t = rc.get("data.heldout_target");
  if (s.empty() && t.empty()) return std::nullopt;
  if (s.empty() || t.empty()) throw Error("data.heldout_source and data.heldout_target must be set together");
  return load_parallel(s, t, cli::load_options(rc));
}

template <class Model>
void save_model(const Model& m, const fs::path& path) {
  std::ostringstream out;
  m.save(out);
  text::write_file(path, out.str());
}

template <class Model>
Model load_model(const fs::path& path) {
  std::istringstream in(text::read_file(path));
  try {
    return Model::load(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

lm::DomainScorer obtain_domain_scorer(const RunDir& dir, const Corpus& background, const cli::RunConfig& rc,
                                      const em::EmConfig& ec) {
  if (fs::exists(dir.lm_general()) && fs::exists(dir.lm_indomain())) {
    lm::DomainScorer s{load_model<lm::NgramLm>(dir.lm_general()), load_model<lm::NgramLm>(dir.lm_indomain())};
    lm::validate(s);
    return s;
  }
  auto s = em::train_domain_scorer(background, load_indomain(rc), ec);
  save_model(s.general, dir.lm_general());
  save_model(s.indomain, dir.lm_indomain());
  return s;
}

em::TranslationModels obtain_translation_models(const RunDir& dir, const Corpus& background,
                                                const cli::RunConfig& rc, const em::EmConfig& ec) {
  if (fs::exists(dir.tm_noisy()) && fs::exists(dir.tm_clean()))
    return {load_model<tm::Model1>(dir.tm_noisy()), load_model<tm::Model1>(dir.tm_clean())};
  auto m = em::train_translation_models(background, load_trusted(rc), ec);
  save_model(m.noisy, dir.tm_noisy());
  save_model(m.clean, dir.tm_clean());
  return m;
}

em::EmConfig runtime_em_config(const cli::RunConfig& rc) {
  auto ec = cli::em_config(rc);
  ec.threads = threads_from_env();
  return ec;
}

std::vector<double> denoise_of(em::TranslationModels m, const Corpus& background, int threads) {
  tm::DenoiseScorer s{std::make_shared<const tm::Model1>(std::move(m.noisy)),
                      std::make_shared<const tm::Model1>(std::move(m.clean))};
  return tm::denoise_scores(s, background, threads);
}

// Scores for whichever components `kind` needs.
std::shared_ptr<sched::PairScores> scores_for(sched::CurriculumKind kind, const RunDir& dir,
                                              const Corpus& background, const cli::RunConfig& rc,
                                              const em::EmConfig& ec) {
  auto scores = std::make_shared<sched::PairScores>();
  const bool domain = kind == sched::CurriculumKind::domain || kind == sched::CurriculumKind::mix ||
                      kind == sched::CurriculumKind::cascade;
  const bool denoise = kind == sched::CurriculumKind::denoise || kind == sched::CurriculumKind::mix ||
                       kind == sched::CurriculumKind::cascade;
  if (domain)
    scores->domain = lm::domain_scores(obtain_domain_scorer(dir, background, rc, ec), background, ec.threads);
  if (denoise)
    scores->denoise = denoise_of(obtain_translation_models(dir, background, rc, ec), background, ec.threads);
  return scores;
}

std::vector<std::uint32_t> all_ids(std::size_t n) {
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  return ids;
}

void write_batches(sched::Schedule& schedule, std::int64_t steps, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << sched::batch_log_header() << '\n';
  for (std::int64_t t = 0; t < steps; ++t) out << sched::format_step(schedule.step(t)) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::string id_lines(std::span<const std::uint32_t> ids) {
  std::string s;
  for (auto id : ids) s += std::to_string(id) + '\n';
  return s;
}

// --- subcommands ----------------------------------------------------------

void cmd_synth(const cli::RunConfig& rc, const std::string& out) {
  const auto dir = open_run_dir(out, rc);
  const auto data = synth::gen_synthetic(cli::synth_config(rc));
  const fs::path d = fs::absolute(dir.root / "data");
  write_parallel(data.background, d / "background.src", d / "background.tgt");
  write_labels(data.background, d / "background.labels.tsv");
  write_monolingual(data.indomain_mono, d / "indomain.src");
  write_parallel(data.trusted, d / "trusted.src", d / "trusted.tgt");
  write_parallel(data.heldout, d / "heldout.src", d / "heldout.tgt");
  std::string conf = "# synthetic corpora written by `cocur synth`\n";
  auto line = [&](std::string_view key, const fs::path& p) { conf += std::string(key) + " = " + p.string() + '\n'; };
  line("data.background_source", d / "background.src");
  line("data.background_target", d / "background.tgt");
  line("data.background_labels", d / "background.labels.tsv");
  line("data.indomain", d / "indomain.src");
  line("data.trusted_source", d / "trusted.src");
  line("data.trusted_target", d / "trusted.tgt");
  line("data.heldout_source", d / "heldout.src");
  line("data.heldout_target", d / "heldout.tgt");
  text::write_file(dir.root / "data.conf", conf);
}

void cmd_train_lm(const cli::RunConfig& rc, const std::string& out) {
  const auto dir = open_run_dir(out, rc);
  const auto s = em::train_domain_scorer(load_background(rc), load_indomain(rc), runtime_em_config(rc));
  save_model(s.general, dir.lm_general());
  save_model(s.indomain, dir.lm_indomain());
}

void cmd_train_tm(const cli::RunConfig& rc, const std::string& out) {
  const auto dir = open_run_dir(out, rc);
  const auto m = em::train_translation_models(load_background(rc), load_trusted(rc), runtime_em_config(rc));
  save_model(m.noisy, dir.tm_noisy());
  save_model(m.clean, dir.tm_clean());
}

void cmd_score(const cli::RunConfig& rc, const std::string& out, const std::string& which) {
  const auto dir = open_run_dir(out, rc);
  const auto ec = runtime_em_config(rc);
  const auto background = load_background(rc);
  std::vector<double> dom, den;
  if (which != "denoise")
    dom = lm::domain_scores(obtain_domain_scorer(dir, background, rc, ec), background, ec.threads);
  if (which != "domain") den = denoise_of(obtain_translation_models(dir, background, rc, ec), background, ec.threads);
  std::string tsv;
  for (std::size_t i = 0; i < background.size(); ++i) {
    tsv += std::to_string(i);
    if (!dom.empty()) tsv += '\t' + text::format_double(dom[i]);
    if (!den.empty()) tsv += '\t' + text::format_double(den[i]);
    tsv += '\n';
  }
  text::write_file(dir.root / "scores.tsv", tsv);
}

void cmd_select(const cli::RunConfig& rc, const std::string& out) {
  const auto dir = open_run_dir(out, rc);
  const auto ec = runtime_em_config(rc);
  const auto background = load_background(rc);
  const auto scores = scores_for(ec.curriculum.kind, dir, background, rc, ec);
  const auto ids = all_ids(background.size());
  for (auto t : cli::checkpoints(rc)) {
    const auto sel = sched::select_for_kind(ec.curriculum, *scores, t, ids);
    text::write_file(dir.root / "selections" / ("step_" + std::to_string(t) + ".txt"), id_lines(sel));
  }
}

void cmd_run(const cli::RunConfig& rc, const std::string& out) {
  const auto dir = open_run_dir(out, rc);
  const auto ec = runtime_em_config(rc);
  const auto background = load_background(rc);
  sched::Schedule schedule(ec.curriculum, scores_for(ec.curriculum.kind, dir, background, rc, ec),
                           background.size());
  write_batches(schedule, ec.curriculum.max_steps, dir.logs() / "batches.csv");
}

void cmd_em(const cli::RunConfig& rc, const std::string& out) {
  const auto dir = open_run_dir(out, rc);
  const auto ec = runtime_em_config(rc);
  const auto background = load_background(rc);
  const auto indomain = load_indomain(rc);
  const auto trusted = load_trusted(rc);
  const auto heldout = load_heldout(rc);
  const em::EmInputs inputs{&background, &indomain, &trusted, heldout ? &*heldout : nullptr};

  auto state = em::init_em(inputs, ec);
  save_model(state.domain_scorer->general, dir.lm_general());
  save_model(state.domain_scorer->indomain, dir.lm_indomain());
  save_model(*state.noisy_tm, dir.tm_noisy());
  auto checkpoint = [&](const em::EmState& s) {
    save_model(*s.clean_tm, dir.models() / ("tm_clean_iter" + std::to_string(s.iteration) + ".txt"));
    text::write_file(dir.logs() / "em_metrics.csv", em::metrics_csv(s.history));
    std::cerr << "iteration " << s.iteration << " heldout_loglik "
              << text::format_double(s.history.back().heldout_loglik) << '\n';
  };
  checkpoint(state);
  for (int i = 0; i < ec.iterations; ++i) {
    state = em::em_iterate(state, ec);
    checkpoint(state);
  }
  save_model(*state.clean_tm, dir.tm_clean());
  auto schedule = em::gen_curriculum(state, ec);
  write_batches(schedule, ec.curriculum.max_steps, dir.logs() / "batches.csv");
}

void cmd_report(const cli::RunConfig& rc, const std::string& out) {
  const auto dir = open_run_dir(out, rc);
  const auto ec = runtime_em_config(rc);
  const auto background = load_background(rc);
  const auto percentiles = rc.get_doubles("report.percentiles");
  const auto scorer = obtain_domain_scorer(dir, background, rc, ec);
  auto models = obtain_translation_models(dir, background, rc, ec);
  const auto noisy = std::make_shared<const tm::Model1>(std::move(models.noisy));
  const auto clean = std::make_shared<const tm::Model1>(std::move(models.clean));

  const auto dom = lm::domain_scores(scorer, background, ec.threads);
  const auto den = tm::denoise_scores(tm::DenoiseScorer{noisy, clean}, background, ec.threads);
  // Random ordering: a seeded permutation of ranks.
  std::vector<double> rnd(background.size());
  std::iota(rnd.begin(), rnd.end(), 0.0);
  std::mt19937_64 rng(static_cast<std::uint64_t>(rc.get_int("seed")));
  std::shuffle(rnd.begin(), rnd.end(), rng);

  std::vector<diag::PercentileCurve> curves;
  curves.push_back(diag::perword_loss_curve(*noisy, background, den, percentiles, "perword_loss_denoise"));
  curves.push_back(diag::perword_loss_curve(*noisy, background, rnd, percentiles, "perword_loss_random"));
  curves.push_back(diag::loss_stddev_curve(*noisy, background, den, percentiles, "loss_stddev_denoise"));
  curves.push_back(diag::loss_stddev_curve(*noisy, background, rnd, percentiles, "loss_stddev_random"));
  curves.push_back(diag::domain_relevance_curve(scorer, background, dom, percentiles, "domain_relevance_domain"));
  curves.push_back(diag::domain_relevance_curve(scorer, background, den, percentiles, "domain_relevance_denoise"));
  curves.push_back(diag::domain_relevance_curve(scorer, background, rnd, percentiles, "domain_relevance_random"));
  text::write_file(dir.reports() / "curves.csv", diag::curves_csv(curves));
  text::write_file(dir.reports() / "metadata.txt",
                   "loss_model = tm_noisy\n"
                   "loss_note = per-word losses come from the noisy translation model\n"
                   "random_ordering_seed = " + rc.get("seed") + "\n");

  const sched::PairScores scores{dom, den};
  const auto ids = all_ids(background.size());
  {
    // The two cascade orders select different sets in general; report how much they share.
    auto c = ec.curriculum;
    c.kind = sched::CurriculumKind::cascade;
    c.nesting = sched::NestingOrder::denoise_first;
    const auto a = sched::select_for_kind(c, scores, sched::late_phase_start(c), ids);
    c.nesting = sched::NestingOrder::domain_first;
    const auto b = sched::select_for_kind(c, scores, sched::late_phase_start(c), ids);
    std::vector<std::uint32_t> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    const double uni = static_cast<double>(a.size() + b.size() - both.size());
    text::write_file(dir.reports() / "nesting_overlap.csv",
                     "denoise_first,domain_first,shared,jaccard\n" + std::to_string(a.size()) + ',' +
                         std::to_string(b.size()) + ',' + std::to_string(both.size()) + ',' +
                         text::format_double(static_cast<double>(both.size()) / uni) + '\n');
  }

  if (!background.labeled()) return;
  std::string q = "kind,selected,clean_precision,indomain_precision,joint_precision\n";
  for (auto kind : {sched::CurriculumKind::random, sched::CurriculumKind::domain, sched::CurriculumKind::denoise,
                    sched::CurriculumKind::mix, sched::CurriculumKind::cascade}) {
    auto c = ec.curriculum;
    c.kind = kind;
    const auto sel = sched::select_for_kind(c, scores, sched::late_phase_start(c), ids);
    const auto r = diag::selection_quality(sel, background);
    q += std::string(sched::kind_name(kind)) + ',' + std::to_string(sel.size()) + ',' +
         text::format_double(r.clean_precision) + ',' + text::format_double(r.indomain_precision) + ',' +
         text::format_double(r.joint_precision) + '\n';
  }
  text::write_file(dir.reports() / "selection_quality.csv", q);
  std::vector<bool> in_domain, is_clean;
  for (const auto& p : background) {
    in_domain.push_back(p.labels->in_domain);
    is_clean.push_back(p.labels->clean);
  }
  text::write_file(dir.reports() / "auc.csv", "score,label,auc\ndomain,in_domain," +
                                                  text::format_double(diag::score_auc(dom, in_domain)) +
                                                  "\ndenoise,clean," +
                                                  text::format_double(diag::score_auc(den, is_clean)) + '\n');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain and denoising co-curricula for parallel data selection"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  CommonArgs common;
  Overrides o;
  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic benchmark");
  auto* train_lm = app.add_subcommand("train-lm", "train the domain scorer's language models");
  auto* train_tm = app.add_subcommand("train-tm", "train the noisy and clean translation models");
  auto* score = app.add_subcommand("score", "write id, domain and denoising scores as TSV");
  auto* select = app.add_subcommand("select", "write selections at select.checkpoints");
  auto* run = app.add_subcommand("run", "run the online curriculum and log every batch");
  auto* em_opt = app.add_subcommand("em-optimize", "EM-style bootstrap of the denoising scorer");
  auto* report = app.add_subcommand("report", "curves, selection quality and AUCs");
  for (auto* cmd : {synth, train_lm, train_tm, score, select, run, em_opt, report}) add_common(cmd, common);

  const std::vector<std::string> kinds = {"random", "domain", "denoise", "mix", "cascade"};
  for (auto* cmd : {select, run, em_opt})
    cmd->add_option("--kind", o.kind, "curriculum kind")->check(CLI::IsMember(kinds));
  run->add_option("--max-steps", o.max_steps, "steps to run")->check(CLI::NonNegativeNumber);
  em_opt->add_option("--max-steps", o.max_steps, "steps of the final schedule's batch log")
      ->check(CLI::NonNegativeNumber);
  em_opt->add_option("--iterations", o.iterations, "bootstrap iterations")->check(CLI::NonNegativeNumber);
  em_opt->add_option("--em-steps", o.em_steps, "late-phase batches per iteration")->check(CLI::NonNegativeNumber);
  score->add_option("--scorer", o.scorer, "columns to write")->check(CLI::IsMember({"both", "domain", "denoise"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const auto rc = resolve(common, o);
    if (*synth) cmd_synth(rc, common.out);
    else if (*train_lm) cmd_train_lm(rc, common.out);
    else if (*train_tm) cmd_train_tm(rc, common.out);
    else if (*score) cmd_score(rc, common.out, o.scorer);
    else if (*select) cmd_select(rc, common.out);
    else if (*run) cmd_run(rc, common.out);
    else if (*em_opt) cmd_em(rc, common.out);
    else if (*report) cmd_report(rc, common.out);
  } catch (const std::exception& e) {
    std::cerr << "cocur: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
