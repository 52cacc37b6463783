#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include "nel/candidates.hpp"
#include "nel/corpus.hpp"
#include "nel/dictionary.hpp"
#include "nel/features.hpp"
#include "nel/knowledge_graph.hpp"
#include "nel/linker.hpp"
#include "nel/trainer.hpp"

namespace {

struct TrainArgs {
  std::string corpus;
  std::string kg;
  std::string dict;
  std::string aug;
  std::string feature_config;
  std::string out;
  std::string export_prefix;
  int dim = 300;
  double lr = 0.02;
  double lambda = 1e-4;
  int negatives = 5;
  std::uint64_t seed = 1;
  long iters = 100000;
  double tol = 1e-3;
  long window = 1000;
  int batch = 1;
  int threads = 1;
  long min_links = 5;
  double aug_weight = 1.0;
  long log_every = 0;
  bool decay = false;
};

struct LinkArgs {
  std::string ckpt;
  std::string corpus;
  std::string dict;
  std::string out;
  bool baseline_prior = false;
};

struct EvalArgs {
  std::string preds;
  std::string gold;
  std::string level = "sentence";
  std::string subset;
};

struct RelatednessArgs {
  std::string ckpt;
  std::string queries;
  std::vector<int> ks = {1, 5, 10};
};

struct ExportArgs {
  std::string ckpt;
  std::string out;
};

// Appends selected augmentation sentences and their linkable anchors; aug
// tuples carry aug_weight in the parallel weight vector.
void merge_augmentation(nel::Corpus& corpus, std::vector<double>& weights,
                        const std::vector<nel::AnchoredArticle>& articles,
                        const nel::CandidateDictionary& dict, long min_links,
                        double aug_weight) {
  std::unordered_set<std::string> have;
  for (const auto& s : corpus.sentences) have.insert(nel::sentence_key(s.ref));
  for (const auto* article : nel::select_articles(articles, dict, min_links)) {
    std::unordered_set<std::string> kept;
    for (const auto* s : nel::filter_sentences(*article, dict)) {
      kept.insert(nel::sentence_key(s->ref));
      if (have.insert(nel::sentence_key(s->ref)).second) corpus.sentences.push_back(*s);
    }
    for (const auto& anchor : article->anchors) {
      if (!kept.count(nel::sentence_key(anchor.span.sentence))) continue;
      if (!dict.has_pair(anchor.span.surface, anchor.gold_entity)) continue;
      corpus.tuples.push_back(anchor);
      weights.push_back(aug_weight);
    }
  }
}

int run_train(const TrainArgs& args) {
  auto corpus = nel::load_corpus(args.corpus);
  auto dict = nel::load_dictionary(args.dict);
  auto kg = nel::load_knowledge_graph(args.kg);
  nel::FeatureConfig fcfg;
  if (!args.feature_config.empty()) fcfg = nel::load_feature_config(args.feature_config);

  std::size_t dropped = nel::drop_unlinkable(corpus, dict);
  if (dropped) std::cerr << "dropped " << dropped << " unlinkable tuples\n";
  std::vector<double> weights(corpus.tuples.size(), 1.0);
  if (!args.aug.empty()) {
    auto before = corpus.tuples.size();
    merge_augmentation(corpus, weights, nel::load_anchored_articles(args.aug), dict,
                       args.min_links, args.aug_weight);
    std::cerr << "augmentation added " << (corpus.tuples.size() - before) << " anchors\n";
  }
  if (corpus.tuples.empty()) {
    std::cerr << "error: no linkable training tuples\n";
    return 1;
  }
  nel::renumber_mids(corpus.tuples);

  auto vocab = nel::build_feature_vocab(corpus, fcfg, weights);
  auto sets = nel::build_edge_sets(corpus, vocab, dict, kg, weights);
  for (const auto& w : sets.warnings) std::cerr << "warning: " << w << '\n';

  nel::TrainConfig cfg;
  cfg.dim = args.dim;
  cfg.alpha = args.lr;
  cfg.lambda = args.lambda;
  cfg.negatives = args.negatives;
  cfg.seed = args.seed;
  cfg.iterations = args.iters;
  cfg.tol = args.tol;
  cfg.window = args.window;
  cfg.batch = args.batch;
  cfg.threads = args.threads;
  cfg.decay = args.decay;
  cfg.log_every = args.log_every;
  cfg.log = args.log_every > 0 ? &std::cerr : nullptr;

  nel::TableCounts counts;
  counts.features = vocab.size();
  counts.mentions = static_cast<int>(corpus.tuples.size());
  counts.entities = sets.entities.size();
  counts.types = sets.types.size();
  auto store = nel::init_params(counts, cfg);
  auto report = nel::train(sets, store, cfg);

  auto model = nel::make_model(std::move(store), vocab, sets.entities, sets.types, fcfg);
  nel::save_checkpoint(model, args.out);
  if (!args.export_prefix.empty()) nel::export_model_embeddings(model, args.export_prefix);

  std::cout << "iterations " << report.iterations << '\n'
            << "converged " << (report.converged ? "yes" : "no") << '\n'
            << "wall_seconds " << report.wall_seconds << '\n';
  if (!report.total_loss.empty()) {
    std::cout << "final_sampled_loss " << report.total_loss.back() << '\n';
  }
  if (report.skipped_quad_draws) {
    std::cout << "skipped_quad_draws " << report.skipped_quad_draws << '\n';
  }
  for (const auto& note : report.notes) std::cerr << "note: " << note << '\n';
  std::cout << "checkpoint " << args.out << '\n';
  return 0;
}

int run_link(const LinkArgs& args) {
  auto corpus = nel::load_corpus(args.corpus);
  auto dict = nel::load_dictionary(args.dict);
  std::vector<nel::Prediction> preds;
  std::size_t skipped = 0;
  if (args.baseline_prior) {
    auto stats = nel::anchor_stats_from_dictionary(dict);
    std::tie(preds, skipped) = nel::baseline_link_corpus(corpus, dict, stats);
  } else {
    auto model = nel::load_checkpoint(args.ckpt);
    std::tie(preds, skipped) = nel::link_corpus(corpus, dict, model);
  }
  nel::write_predictions_tsv(preds, args.out);
  std::cout << "linked " << preds.size() << '\n' << "skipped " << skipped << '\n'
            << "predictions " << args.out << '\n';
  return 0;
}

int run_eval(const EvalArgs& args) {
  auto corpus = nel::load_corpus(args.gold);
  auto preds = nel::read_predictions_tsv(args.preds);
  nel::align_predictions(preds, corpus);
  auto level = args.level == "document" ? nel::EvalLevel::kDocument
                                        : nel::EvalLevel::kSentence;
  if (args.subset == "same-mention") {
    auto eval = nel::same_mention_subset_eval(corpus, preds, level);
    std::cout << "subset_documents " << eval.documents << '\n';
    if (eval.documents) {
      std::cout << "micro_accuracy " << eval.micro << '\n'
                << "macro_accuracy " << eval.macro << '\n';
    }
    return 0;
  }
  auto gold = nel::gold_by_mid(corpus);
  std::cout << "micro_accuracy " << nel::micro_accuracy(preds, gold) << '\n'
            << "macro_accuracy " << nel::macro_accuracy(preds, gold, level) << '\n';
  return 0;
}

// Query rows: query <TAB> candidate[=gain] ... ; bare candidates score gain 1.
int run_relatedness(const RelatednessArgs& args) {
  auto model = nel::load_checkpoint(args.ckpt);
  std::ifstream in(args.queries);
  if (!in) {
    std::cerr << "error: cannot open '" << args.queries << "'\n";
    return 1;
  }
  std::vector<double> sums(args.ks.size(), 0.0);
  long rows = 0;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      auto next = line.find('\t', pos);
      fields.push_back(line.substr(pos, next - pos));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (fields.size() < 2) {
      std::cerr << "error: " << args.queries << ":" << line_no
                << ": need a query and at least one candidate\n";
      return 1;
    }
    std::vector<std::string> candidates;
    std::unordered_map<std::string, double> gain;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      std::string name = fields[i];
      double g = 1.0;
      auto eq = name.rfind('=');
      if (eq != std::string::npos && eq + 1 < name.size()) {
        try {
          std::size_t used = 0;
          double parsed = std::stod(name.substr(eq + 1), &used);
          if (used == name.size() - eq - 1) {
            g = parsed;
            name = name.substr(0, eq);
          }
        } catch (const std::exception&) {
        }
      }
      candidates.push_back(name);
      gain[name] = g;
    }
    auto ranked = nel::entity_relatedness_rank(fields[0], candidates, model);
    for (std::size_t i = 0; i < args.ks.size(); ++i) {
      sums[i] += nel::ndcg_at_k(ranked, gain, args.ks[i]);
    }
    ++rows;
  }
  if (!rows) {
    std::cerr << "error: no queries in '" << args.queries << "'\n";
    return 1;
  }
  for (std::size_t i = 0; i < args.ks.size(); ++i) {
    std::cout << "ndcg@" << args.ks[i] << " " << sums[i] / static_cast<double>(rows)
              << '\n';
  }
  return 0;
}

int run_export(const ExportArgs& args) {
  auto model = nel::load_checkpoint(args.ckpt);
  nel::export_model_embeddings(model, args.out);
  for (const char* suffix :
       {".features.vec", ".mentions.vec", ".entity-target.vec", ".entity-context.vec",
        ".types.vec"}) {
    std::cout << args.out << suffix << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint embedding trainer and sentence-level entity linker"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "learn embeddings from a corpus and graph");
  train->add_option("--corpus", train_args.corpus, "training corpus")->required();
  train->add_option("--kg", train_args.kg, "knowledge graph triples")->required();
  train->add_option("--dict", train_args.dict, "candidate dictionary")->required();
  train->add_option("--aug", train_args.aug, "anchored articles for augmentation");
  train->add_option("--feature-config", train_args.feature_config, "feature settings file");
  train->add_option("--dim", train_args.dim, "embedding dimension");
  train->add_option("--lr", train_args.lr, "learning rate");
  train->add_option("--lambda", train_args.lambda, "hinge L2 weight");
  train->add_option("--negatives", train_args.negatives, "negative samples per positive");
  train->add_option("--seed", train_args.seed, "RNG seed");
  train->add_option("--iters", train_args.iters, "iteration cap");
  train->add_option("--tol", train_args.tol, "convergence tolerance; 0 disables");
  train->add_option("--window", train_args.window, "convergence window");
  train->add_option("--batch", train_args.batch, "edges per objective per iteration");
  train->add_option("--threads", train_args.threads,
                    "worker threads; above 1 trades determinism for speed");
  train->add_option("--min-links", train_args.min_links,
                    "augmentation articles need more links than this");
  train->add_option("--aug-weight", train_args.aug_weight, "augmentation anchor weight");
  train->add_option("--log-every", train_args.log_every, "loss line interval");
  train->add_flag("--decay", train_args.decay, "linear learning-rate decay");
  train->add_option("--export", train_args.export_prefix,
                    "also write embedding text files with this prefix");
  train->add_option("--out", train_args.out, "checkpoint path")->required();

  LinkArgs link_args;
  auto* link = app.add_subcommand("link", "link corpus mentions to entities");
  link->add_option("--ckpt", link_args.ckpt, "trained checkpoint");
  link->add_option("--corpus", link_args.corpus, "corpus to link")->required();
  link->add_option("--dict", link_args.dict, "candidate dictionary")->required();
  link->add_option("--out", link_args.out, "predictions TSV")->required();
  link->add_flag("--baseline-prior", link_args.baseline_prior,
                 "rank by anchor prior instead of embeddings");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "score predictions against gold labels");
  eval->add_option("--preds", eval_args.preds, "predictions TSV")->required();
  eval->add_option("--gold", eval_args.gold, "gold corpus")->required();
  eval->add_option("--level", eval_args.level, "macro grouping")
      ->check(CLI::IsMember({"sentence", "document"}));
  eval->add_option("--subset", eval_args.subset, "restrict evaluation")
      ->check(CLI::IsMember({"same-mention"}));

  RelatednessArgs rel_args;
  auto* rel = app.add_subcommand("relatedness", "rank candidates by entity similarity");
  rel->add_option("--ckpt", rel_args.ckpt, "trained checkpoint")->required();
  rel->add_option("--queries", rel_args.queries, "query file")->required();
  rel->add_option("--k", rel_args.ks, "NDCG cutoffs")->delimiter(',');

  ExportArgs export_args;
  auto* exp = app.add_subcommand("export", "write embedding tables as text");
  exp->add_option("--ckpt", export_args.ckpt, "trained checkpoint")->required();
  exp->add_option("--out", export_args.out, "output file prefix")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(train)) return run_train(train_args);
    if (app.got_subcommand(link)) {
      if (!link_args.baseline_prior && link_args.ckpt.empty()) {
        std::cerr << "error: link needs --ckpt unless --baseline-prior is set\n";
        return 1;
      }
      return run_link(link_args);
    }
    if (app.got_subcommand(eval)) return run_eval(eval_args);
    if (app.got_subcommand(rel)) return run_relatedness(rel_args);
    if (app.got_subcommand(exp)) return run_export(export_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
