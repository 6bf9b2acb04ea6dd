// SPDX-License-Identifier: Apache-2.0
/**
 * @file   commands.hpp
 * @brief  Command implementations behind the hapnet executable.
 *
 * Every path an option names is taken relative to Options::root unless it is
 * absolute. Commands print progress to stdout and signal failure by throwing
 * hapnet::Error.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hapnet::cli {

struct Options {
  std::string root = ".";
  std::string manifest;
  std::string prepared;
  std::string features;
  std::string checkpoint;
  std::string out;
  std::string adjective = "all";
  std::uint64_t seed = 0;
  int splits = 3;
  int epochs = 200;
  int finetune_epochs = -1; ///< -1: same as epochs
  int batch = 1000;
  double lr = 0.01;
  double momentum = 0.9;
  bool freeze = false;
  bool keep_classifier = false;
  std::string pca_scope = "train";
  std::string tap_layer; ///< empty: the graph's default tap
  std::string combine = "trials";
  std::string visual_combine = "views";
  std::string modality = "fused";

  // synth
  std::string preset = "default";
  std::size_t objects = 53;
  std::size_t trials = 10;
  double noise = -1.0; ///< negative: preset default

  // dump-activations
  std::string object;
  int trial = 0;
  int finger = 0;
  int offset = 0;

  std::vector<std::string> inputs; ///< report files
};

void run_synth(const Options &o);
void run_preprocess(const Options &o);
void run_train(const Options &o, bool lstm);
void run_extract(const Options &o);
void run_fuse(const Options &o);
void run_eval(const Options &o);
void run_report(const Options &o);
void run_dump_activations(const Options &o);

} // namespace hapnet::cli
