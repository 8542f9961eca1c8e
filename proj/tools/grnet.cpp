// grnet: dataset generation, training, evaluation and studies.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "grnet/dataset/generate.hpp"
#include "grnet/dataset/io.hpp"
#include "grnet/error.hpp"
#include "grnet/eval/experiment.hpp"
#include "grnet/model/checkpoint.hpp"
#include "json.hpp"

using namespace grnet;

namespace {

enum Exit { kOk = 0, kUsage = 1, kIncompatible = 2, kRuntime = 3 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
      return kUsage;
    case ErrorCode::kIncompatible:
    case ErrorCode::kOutOfVocabulary:
    case ErrorCode::kInvalidDomain:
      return kIncompatible;
    default:
      return kRuntime;
  }
}

planning::DomainVocabulary vocabulary_of(const std::string& dataset_path) {
  const auto domain = dataset::peek_domain(dataset_path);
  if (domain.empty()) throw Error(ErrorCode::kEmptyInput, dataset_path + " holds no records");
  return planning::build_blocksworld_vocabulary(planning::blocks_in_domain(domain));
}

model::ModelConfig config_from(const std::string& path, std::optional<std::size_t> epochs,
                               std::optional<std::uint64_t> seed) {
  model::ModelConfig cfg = path.empty() ? model::ModelConfig{} : model::load_config(path);
  if (epochs) cfg.epochs = *epochs;
  if (seed) cfg.rng_seed = *seed;
  cfg.validate();
  return cfg;
}

void print_table(std::ostream& out, const eval::MetricsTable& t) {
  out << std::fixed << std::setprecision(2);
  out << "obs    n      acc     P       R       F1      chance  lat_ms  lat_sd\n";
  for (const auto& r : t.rows)
    out << std::setw(5) << r.observability << "  " << std::setw(5) << r.count << "  " << std::setw(6) << r.accuracy
        << "  " << std::setw(6) << r.precision << "  " << std::setw(6) << r.recall << "  " << std::setw(6) << r.f1
        << "  " << std::setw(6) << r.chance << "  " << std::setw(6) << r.latency_mean_ms << "  " << std::setw(6)
        << r.latency_std_ms << "\n";
}

auto epoch_logger(bool quiet) {
  return [quiet](std::size_t epoch, const model::EpochStats& s) {
    if (!quiet) std::cerr << "epoch " << epoch << " train " << s.train_loss << " val " << s.validation_loss << "\n";
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal recognition from observed action labels"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a training, test or difficulty-class dataset");
  std::string gen_kind = "train", gen_out;
  std::size_t blocks = 7, pairs = 5000, goal_sets = 100, per_bucket = 50, gmin = 2, gmax = 4, smin = 5, smax = 10,
              hidden_per_set = 2, plans_per_problem = 4;
  std::vector<double> observabilities{0.3, 0.5, 0.7};
  double omin = 0.3, omax = 0.7, overlap_min = 0.0, overlap_max = 1.0;
  std::uint64_t gen_seed = 1;
  gen->add_option("--kind", gen_kind, "train, test or buckets")
      ->check(CLI::IsMember({"train", "test", "buckets"}))
      ->capture_default_str();
  gen->add_option("--blocks", blocks, "Number of blocks")->capture_default_str();
  gen->add_option("--pairs", pairs, "Training pairs (train)")->capture_default_str();
  gen->add_option("--min-observability", omin, "Lowest training observability (train)")->capture_default_str();
  gen->add_option("--max-observability", omax, "Highest training observability (train)")->capture_default_str();
  gen->add_option("--plans-per-problem", plans_per_problem, "Traces per initial state (train)")->capture_default_str();
  gen->add_option("--goal-sets", goal_sets, "Goal sets (test)")->capture_default_str();
  gen->add_option("--hidden-per-set", hidden_per_set, "Hidden goals per goal set (test)")->capture_default_str();
  gen->add_option("--per-bucket", per_bucket, "Instances per difficulty class (buckets)")->capture_default_str();
  gen->add_option("--observability", observabilities, "Observability levels (test, buckets uses the first)")
      ->delimiter(',')
      ->capture_default_str();
  gen->add_option("--goal-min", gmin, "Smallest goal size")->capture_default_str();
  gen->add_option("--goal-max", gmax, "Largest goal size")->capture_default_str();
  gen->add_option("--set-min", smin, "Smallest goal set")->capture_default_str();
  gen->add_option("--set-max", smax, "Largest goal set")->capture_default_str();
  gen->add_option("--overlap-min", overlap_min, "Lowest distractor overlap")->capture_default_str();
  gen->add_option("--overlap-max", overlap_max, "Highest distractor overlap")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generation seed")->capture_default_str();
  gen->add_option("-o,--out", gen_out, "Output file (JSON lines)")->required();

  // train
  auto* tr = app.add_subcommand("train", "Train a model on a pair dataset");
  std::string tr_data, tr_config, tr_out;
  std::optional<std::size_t> tr_epochs;
  std::optional<std::uint64_t> tr_seed;
  bool quiet = false;
  tr->add_option("-d,--data", tr_data, "Training pairs (JSON lines)")->required()->check(CLI::ExistingFile);
  tr->add_option("-c,--config", tr_config, "Model config file (key = value)")->check(CLI::ExistingFile);
  tr->add_option("--epochs", tr_epochs, "Override the configured epoch count");
  tr->add_option("--seed", tr_seed, "Override the configured seed");
  tr->add_option("-o,--out", tr_out, "Checkpoint output")->required();
  tr->add_flag("-q,--quiet", quiet, "No per-epoch log");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a test dataset");
  std::string ev_data, ev_model, ev_report;
  ev->add_option("-d,--data", ev_data, "Test instances")->required()->check(CLI::ExistingFile);
  ev->add_option("-m,--model", ev_model, "Checkpoint")->required()->check(CLI::ExistingFile);
  ev->add_option("-r,--report", ev_report, "Per-instance records (JSON lines); summary goes to the .csv sibling")
      ->required();

  // recognize
  auto* rc = app.add_subcommand("recognize", "Recognize the goal of the first instance in a file");
  std::string rc_input, rc_model;
  bool mean_score = false;
  rc->add_option("-i,--instance", rc_input, "Instance file (JSON lines)")->required()->check(CLI::ExistingFile);
  rc->add_option("-m,--model", rc_model, "Checkpoint")->required()->check(CLI::ExistingFile);
  rc->add_flag("--mean-score", mean_score, "Divide each score by the goal size");

  // buckets
  auto* bk = app.add_subcommand("buckets", "Accuracy per difficulty class");
  std::string bk_data, bk_model, bk_out;
  bk->add_option("-d,--data", bk_data, "Instances")->required()->check(CLI::ExistingFile);
  bk->add_option("-m,--model", bk_model, "Checkpoint")->required()->check(CLI::ExistingFile);
  bk->add_option("-o,--out", bk_out, "CSV output");

  // size-study
  auto* ss = app.add_subcommand("size-study", "Accuracy as a function of training-set size");
  std::string ss_train, ss_test, ss_config, ss_out;
  std::vector<double> fractions{0.2, 0.4, 0.6, 0.8, 1.0};
  std::optional<std::size_t> ss_epochs;
  std::optional<std::uint64_t> ss_seed;
  ss->add_option("--train", ss_train, "Training pairs")->required()->check(CLI::ExistingFile);
  ss->add_option("--test", ss_test, "Test instances")->required()->check(CLI::ExistingFile);
  ss->add_option("-c,--config", ss_config, "Model config file")->check(CLI::ExistingFile);
  ss->add_option("--fractions", fractions, "Training fractions")->delimiter(',')->capture_default_str();
  ss->add_option("--epochs", ss_epochs, "Override the configured epoch count");
  ss->add_option("--seed", ss_seed, "Override the configured seed");
  ss->add_option("-o,--out", ss_out, "CSV output");
  ss->add_flag("-q,--quiet", quiet, "No per-epoch log");

  // vocab
  auto* vc = app.add_subcommand("vocab", "Print the vocabulary manifest of a domain");
  vc->add_option("--blocks", blocks, "Number of blocks")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc_parse = app.exit(e);
    return rc_parse == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      const planning::Blocksworld bw(blocks);
      if (gen_kind == "train") {
        dataset::TrainingSetConfig c;
        c.n_blocks = blocks;
        c.num_pairs = pairs;
        c.min_observability = omin;
        c.max_observability = omax;
        c.min_goal_size = gmin;
        c.max_goal_size = gmax;
        c.plans_per_problem = plans_per_problem;
        c.seed = gen_seed;
        const auto data = dataset::generate_training_pairs(bw, c);
        dataset::write_dataset(gen_out, data, bw.vocabulary());
        std::cout << "wrote " << data.size() << " pairs to " << gen_out << "\n";
      } else {
        dataset::TestSetConfig c;
        c.n_blocks = blocks;
        c.num_goal_sets = goal_sets;
        c.observabilities = observabilities;
        c.min_goal_set_size = smin;
        c.max_goal_set_size = smax;
        c.min_goal_size = gmin;
        c.max_goal_size = gmax;
        c.hidden_per_set = hidden_per_set;
        c.min_overlap = overlap_min;
        c.max_overlap = overlap_max;
        c.seed = gen_seed;
        const auto data = gen_kind == "test"
                              ? dataset::generate_test_instances(bw, c)
                              : dataset::generate_bucket_instances(bw, c, per_bucket, observabilities.at(0));
        dataset::write_dataset(gen_out, data, bw.vocabulary());
        std::cout << "wrote " << data.size() << " instances to " << gen_out << "\n";
      }
    } else if (*tr) {
      const auto vocab = vocabulary_of(tr_data);
      const auto cfg = config_from(tr_config, tr_epochs, tr_seed);
      const auto data = dataset::read_training_pairs(tr_data, vocab);
      auto result = model::train(data, cfg, vocab, epoch_logger(quiet));
      model::save_checkpoint(tr_out, {cfg, vocab.domain_id(), vocab.checksum(), result.params, result.report.history});
      std::cout << "trained on " << data.size() << " pairs: best epoch " << result.report.best_epoch
                << ", train loss " << result.report.final_train_loss << ", validation loss "
                << result.report.final_validation_loss << ", " << result.report.seconds << " s\n";
    } else if (*ev) {
      const auto result = eval::run_experiment(ev_data, ev_model, ev_report);
      print_table(std::cout, result.table);
    } else if (*rc) {
      std::ifstream in(rc_input);
      std::string line;
      while (std::getline(in, line) && line.empty()) {
      }
      if (line.empty()) throw Error(ErrorCode::kEmptyInput, rc_input + " holds no instance");
      const auto domain = nlohmann::json::parse(line, nullptr, false);
      if (domain.is_discarded() || !domain.contains("domain"))
        throw Error(ErrorCode::kParse, rc_input + ": not an instance record");
      const auto vocab =
          planning::build_blocksworld_vocabulary(planning::blocks_in_domain(domain["domain"].get<std::string>()));
      const auto ckpt = model::load_checkpoint(rc_model, vocab);
      const auto inst = dataset::decode_record(line, vocab, 1);
      const auto r = recognizer::recognize(inst, ckpt.params, vocab,
                                           mean_score ? recognizer::ScoreMode::kMean : recognizer::ScoreMode::kSum);
      nlohmann::ordered_json out;
      out["selected"] = r.selected_index;
      out["hidden"] = inst.hidden_index;
      out["scores"] = r.scores;
      nlohmann::ordered_json goals = nlohmann::json::array();
      for (const auto& g : inst.goal_set) goals.push_back(planning::to_string(g));
      out["goals"] = goals;
      out["latency_ms"] = 1000.0 * r.latency;
      std::cout << out.dump(2) << "\n";
    } else if (*bk) {
      const auto vocab = vocabulary_of(bk_data);
      const auto ckpt = model::load_checkpoint(bk_model, vocab);
      const auto records = eval::evaluate(dataset::read_dataset(bk_data, vocab), ckpt.params, vocab);
      std::ostringstream csv;
      csv << "observability,class,accuracy,count\n";
      for (const auto& [obs, row] : eval::bucket_table(records))
        for (const auto& [cls, cell] : row) csv << obs << ",C" << cls << ',' << cell.accuracy << ',' << cell.count << '\n';
      std::cout << csv.str();
      if (!bk_out.empty()) std::ofstream(bk_out) << csv.str();
    } else if (*ss) {
      const auto vocab = vocabulary_of(ss_train);
      const auto cfg = config_from(ss_config, ss_epochs, ss_seed);
      const auto train_pairs = dataset::read_training_pairs(ss_train, vocab);
      const auto test = dataset::read_dataset(ss_test, vocab);
      const auto rows = eval::run_size_study(train_pairs, fractions, test, cfg, vocab, epoch_logger(quiet));
      std::ostringstream csv;
      csv << "fraction,pairs,accuracy,best_epoch,validation_loss\n";
      for (const auto& r : rows)
        csv << r.fraction << ',' << r.num_pairs << ',' << r.accuracy << ',' << r.report.best_epoch << ','
            << r.report.final_validation_loss << '\n';
      std::cout << csv.str();
      if (!ss_out.empty()) std::ofstream(ss_out) << csv.str();
    } else if (*vc) {
      std::cout << planning::build_blocksworld_vocabulary(blocks).manifest();
    }
  } catch (const Error& e) {
    std::cerr << "grnet: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "grnet: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
