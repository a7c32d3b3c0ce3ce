// Copyright 2026 The Chrononer Authors.
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

// Command-line front end. Talks to the library only through its C API.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chrononer/chrononer.h"

namespace {

struct ConfigHandle {
  chrononer_config* ptr = nullptr;
  ~ConfigHandle() { chrononer_config_free(ptr); }
};

int Fail(chrononer_status status) {
  std::cerr << "chrononer: error: " << chrononer_last_error() << "\n";
  return static_cast<int>(status);
}

void PrintAndFree(char* text) {
  if (text != nullptr) {
    std::cout << text;
    chrononer_string_free(text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Historical named-entity recognition experiments under temporal and style shift"};
  app.set_version_flag("--version", std::string(chrononer_version()));
  app.require_subcommand(1);

  std::string config_file;
  std::optional<std::string> seed, jobs, out, alpha;
  app.add_option("--config", config_file, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "shorthand for --run.seed");
  app.add_option("--jobs", jobs, "shorthand for --run.jobs");
  app.add_option("--out", out, "shorthand for --run.out");
  app.add_option("--alpha", alpha, "shorthand for --stats.alpha");

  // Every configuration key is also a flag of the same dotted name.
  std::map<std::string, std::optional<std::string>> overrides;
  for (size_t i = 0; i < chrononer_config_key_count(); ++i) {
    const std::string key = chrononer_config_key_name(i);
    overrides[key];
    app.add_option("--" + key, overrides[key],
                   std::string(chrononer_config_key_help(i)) + " [default: " +
                       chrononer_config_key_default(i) + "]")
        ->group("Configuration keys");
  }

  const std::vector<std::pair<std::string, std::string>> stages = {
      {"synth", "generate the synthetic corpus"},
      {"prepare", "split the corpus by period and write the four style variants"},
      {"stats", "descriptive statistics of the prepared corpus"},
      {"pretrain", "train forward and backward character language models"},
      {"paths", "train taggers and evaluate all six transfer paths"},
      {"hypotheses", "Welch's t-tests for H1-H4 from the results matrix"},
      {"report", "assemble a Markdown report of the run"},
  };
  for (const auto& [name, help] : stages) app.add_subcommand(name, help)->fallthrough();

  std::string model, style = "unmarked";
  std::optional<uint64_t> train_seed;
  CLI::App* train = app.add_subcommand("train", "train one tagger and write its predictions");
  train->fallthrough();
  train->add_option("--model", model, "embedding provider (charlm or static)")->required();
  train->add_option("--style", style, "training corpus style (marked or unmarked)")
      ->check(CLI::IsMember({"marked", "unmarked"}));
  train->add_option("--train-seed", train_seed, "tagger seed [default: first of run.seeds]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return CHRONONER_CONFIG_ERROR;
  }

  ConfigHandle config;
  if (chrononer_status s = chrononer_config_new(&config.ptr); s != CHRONONER_OK) return Fail(s);
  if (!config_file.empty()) {
    if (auto s = chrononer_config_load_file(config.ptr, config_file.c_str()); s != CHRONONER_OK) {
      return Fail(s);
    }
  }
  for (const auto& [key, value] : overrides) {
    if (!value) continue;
    if (auto s = chrononer_config_set(config.ptr, key.c_str(), value->c_str()); s != CHRONONER_OK) {
      return Fail(s);
    }
  }
  const std::pair<const char*, const std::optional<std::string>*> shorthands[] = {
      {"run.seed", &seed}, {"run.jobs", &jobs}, {"run.out", &out}, {"stats.alpha", &alpha}};
  for (const auto& [key, value] : shorthands) {
    if (!*value) continue;
    if (auto s = chrononer_config_set(config.ptr, key, (*value)->c_str()); s != CHRONONER_OK) {
      return Fail(s);
    }
  }
  // Fail fast: the whole configuration is checked before any stage runs.
  if (auto s = chrononer_config_validate(config.ptr, nullptr); s != CHRONONER_OK) return Fail(s);

  char* summary = nullptr;
  chrononer_status status;
  if (train->parsed()) {
    uint64_t k = 0;
    if (train_seed) {
      k = *train_seed;
    } else {
      char* seeds = nullptr;
      if (auto s = chrononer_config_get(config.ptr, "run.seeds", &seeds); s != CHRONONER_OK) {
        return Fail(s);
      }
      k = std::stoull(std::string(seeds).substr(0, std::string(seeds).find(',')));
      chrononer_string_free(seeds);
    }
    status = chrononer_run_train(config.ptr, model.c_str(), style.c_str(), k, &summary);
  } else {
    const std::string stage = app.get_subcommands().front()->get_name();
    status = chrononer_run_stage(config.ptr, stage.c_str(), &summary);
  }
  if (status != CHRONONER_OK) return Fail(status);
  PrintAndFree(summary);
  return 0;
}
