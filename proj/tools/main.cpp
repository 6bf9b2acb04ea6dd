// SPDX-License-Identifier: Apache-2.0
// hapnet: command-line front end. Errors print one line to stderr,
// `error: <kind>: <message>`, and exit nonzero; bad flags also print usage.
#include "commands.hpp"

#include <hapnet/errors.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>

namespace {

using hapnet::cli::Options;

void common(CLI::App *cmd, Options &o) {
  cmd->add_option("--manifest", o.manifest, "Dataset manifest (JSON)");
  cmd->add_option("--prepared", o.prepared,
                  "Prepared-signal cache written by preprocess");
}

void adjective_flags(CLI::App *cmd, Options &o) {
  cmd->add_option("--adjective", o.adjective,
                  "Adjective name, comma list, or 'all'")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "First split and training seed")
      ->capture_default_str();
  cmd->add_option("--splits", o.splits, "Number of split seeds (1 or 3)")
      ->check(CLI::IsMember({1, 3}))
      ->capture_default_str();
}

void schedule_flags(CLI::App *cmd, Options &o) {
  cmd->add_option("--epochs", o.epochs, "Epochs per training phase")
      ->capture_default_str();
  cmd->add_option("--batch", o.batch, "Batch size (capped at dataset size)")
      ->capture_default_str();
  cmd->add_option("--lr", o.lr, "Learning rate")->capture_default_str();
  cmd->add_option("--momentum", o.momentum, "Momentum")->capture_default_str();
}

} // namespace

int main(int argc, char **argv) {
  Options o;
  CLI::App app{"hapnet: deep haptic and visual adjective classification"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--root", o.root, "Base directory for relative paths")
      ->capture_default_str();

  std::function<void()> action;
  auto bind = [&](CLI::App *cmd, std::function<void()> fn) {
    cmd->callback([&action, fn] { action = fn; });
  };

  auto *synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--preset", o.preset, "default, separable or two-cue")
      ->capture_default_str();
  synth->add_option("--objects", o.objects, "Object count")
      ->capture_default_str();
  synth->add_option("--trials", o.trials, "Trials per object")
      ->capture_default_str();
  synth->add_option("--noise", o.noise, "Override the preset noise level");
  synth->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  synth->add_option("--out", o.out, "Output directory")->required();
  bind(synth, [&] { hapnet::cli::run_synth(o); });

  auto *pre = app.add_subcommand(
      "preprocess", "Validate a manifest and cache prepared signals");
  pre->add_option("--manifest", o.manifest, "Dataset manifest")->required();
  pre->add_option("--out", o.out, "Prepared-signal cache file")->required();
  bind(pre, [&] { hapnet::cli::run_preprocess(o); });

  for (bool lstm : {false, true}) {
    auto *cmd = app.add_subcommand(
        lstm ? "train-lstm" : "train-haptic",
        lstm ? "Train per-adjective haptic LSTMs"
             : "Train per-adjective haptic CNNs");
    common(cmd, o);
    cmd->get_option("--manifest")->required();
    adjective_flags(cmd, o);
    schedule_flags(cmd, o);
    cmd->add_option("--finetune-epochs", o.finetune_epochs,
                    "Hinge-phase epochs (default: --epochs)");
    cmd->add_flag("--freeze", o.freeze,
                  "Train only the classifier during fine-tuning");
    cmd->add_flag("--keep-classifier", o.keep_classifier,
                  "Do not reinitialize the classifier before fine-tuning");
    cmd->add_option("--pca-scope", o.pca_scope,
                    "Fit electrode PCA on 'train' objects or 'all'")
        ->check(CLI::IsMember({"train", "all"}))
        ->capture_default_str();
    cmd->add_option("--out", o.out, "Checkpoint directory")->required();
    bind(cmd, [&o, lstm] { hapnet::cli::run_train(o, lstm); });
  }

  auto *extract = app.add_subcommand(
      "extract", "Write tapped haptic features and pooled visual features");
  common(extract, o);
  extract->get_option("--manifest")->required();
  extract->add_option("--checkpoint", o.checkpoint,
                      "Haptic checkpoint file or directory")
      ->required();
  extract->add_option("--tap-layer", o.tap_layer,
                      "Layer to tap (default: the model's tap)");
  extract->add_option("--combine", o.combine, "Haptic combination")
      ->check(CLI::IsMember({"none", "trials"}))
      ->capture_default_str();
  extract->add_option("--visual-combine", o.visual_combine,
                      "Visual combination")
      ->check(CLI::IsMember({"none", "views"}))
      ->capture_default_str();
  extract->add_option("--out", o.out, "Feature directory")->required();
  bind(extract, [&] { hapnet::cli::run_extract(o); });

  auto *fuse = app.add_subcommand(
      "fuse", "Train linear classifiers on haptic, visual or fused features");
  fuse->add_option("--manifest", o.manifest, "Dataset manifest")->required();
  fuse->add_option("--features", o.features, "Feature directory")->required();
  fuse->add_option("--modality", o.modality, "haptic, visual or fused")
      ->check(CLI::IsMember({"haptic", "visual", "fused"}))
      ->capture_default_str();
  adjective_flags(fuse, o);
  schedule_flags(fuse, o);
  fuse->add_option("--out", o.out, "Checkpoint directory")->required();
  bind(fuse, [&] { hapnet::cli::run_fuse(o); });

  auto *ev = app.add_subcommand(
      "eval", "Score held-out objects and print per-adjective AUC");
  common(ev, o);
  ev->get_option("--manifest")->required();
  ev->add_option("--checkpoint", o.checkpoint, "Checkpoint file or directory")
      ->required();
  ev->add_option("--features", o.features,
                 "Feature directory (default: the one recorded at training)");
  ev->add_option("--adjective", o.adjective, "Restrict to these adjectives")
      ->capture_default_str();
  ev->add_option("--out", o.out, "Report file (a .csv is written beside it)");
  bind(ev, [&] { hapnet::cli::run_eval(o); });

  auto *report = app.add_subcommand(
      "report", "Average per-adjective AUC over seed reports");
  report->add_option("inputs", o.inputs, "Report files")->required();
  report->add_option("--out", o.out, "Combined report file");
  bind(report, [&] { hapnet::cli::run_report(o); });

  auto *dump = app.add_subcommand(
      "dump-activations", "Write one instance's tapped activations as a grid");
  common(dump, o);
  dump->get_option("--manifest")->required();
  dump->add_option("--checkpoint", o.checkpoint, "Haptic checkpoint file")
      ->required();
  dump->add_option("--tap-layer", o.tap_layer, "Layer to dump");
  dump->add_option("--object", o.object,
                   "Object id (default: first test object)");
  dump->add_option("--trial", o.trial, "Trial index")->capture_default_str();
  dump->add_option("--finger", o.finger, "Finger")->capture_default_str();
  dump->add_option("--offset", o.offset, "Subsampling offset")
      ->capture_default_str();
  dump->add_option("--out", o.out, "Grid text file")->required();
  bind(dump, [&] { hapnet::cli::run_dump_activations(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::string what = e.what();
    for (auto &c : what)
      if (c == '\n')
        c = ' ';
    std::cerr << "error: usage: " << what << "\n";
    const CLI::App *scope = &app;
    for (auto *sub : app.get_subcommands())
      scope = sub;
    std::cerr << scope->help();
    return 2;
  }

  try {
    action();
  } catch (const hapnet::Error &e) {
    std::fflush(stdout);
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::fflush(stdout);
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
