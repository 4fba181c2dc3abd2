// sia: command-line entry point.
//
// Exit codes: 0 success, 1 input error (unreadable/invalid input, empty
// dataset, link failure), 2 configuration error. JSON goes to stdout, logs
// to stderr.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "sia/config.hpp"
#include "sia/link/session.hpp"
#include "sia/metrics/engagement.hpp"
#include "sia/review/service.hpp"
#include "sia/synth/scenario.hpp"

namespace {

using namespace sia;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;

struct InputError : Error {
  using Error::Error;
};

struct Options {
  std::string config;
  std::string input;
  std::string out;
  std::string model;
  std::string scenario;
  std::string data_dir;
  std::string bind;
  std::string subject;
  std::string kind;
  int port = -1;
  std::optional<std::uint64_t> seed;
  std::optional<double> drop_after;
  double pace = 1.0;
};

Config resolve_config(const Options& o) {
  Config c = o.config.empty() ? Config{} : load_config(o.config);
  if (o.seed) c.affect.hyperparams.seed = *o.seed;
  if (!o.model.empty()) c.affect.model = o.model;
  if (!o.data_dir.empty()) c.storage.data_dir = o.data_dir;
  if (!o.bind.empty()) c.service.bind = c.link.host = o.bind;
  if (o.port >= 0) {
    if (o.port > 65535) throw ConfigError("config: --port out of range");
    c.service.port = c.link.port = static_cast<std::uint16_t>(o.port);
  }
  return c;
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

bool is_journal_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot read " + p.string());
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && std::string_view(magic, 4) == "AGSJ";
}

pipeline::ReplayInput load_replay_input(const std::filesystem::path& p) {
  try {
    if (is_journal_file(p)) return pipeline::replay_input(read_session(p));
    const auto sc = synth::load_scenario(p);
    return pipeline::replay_input(synth::recording_journal(synth::generate(sc), sc.duration));
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(p.string() + ": " + e.what());
  }
}

affect::LabeledDataset load_dataset_or_default(const Options& o, const Config& c) {
  if (o.input.empty()) return default_training_set(c.affect);
  try {
    return affect::load_dataset(o.input);
  } catch (const Error& e) {
    throw InputError(o.input + ": " + e.what());
  }
}

int cmd_run(const Options& o) {
  const Config c = resolve_config(o);
  if (o.input.empty()) throw InputError("run: --input is required");
  const auto input = load_replay_input(o.input);
  const auto analyzer = make_analyzer(c);
  std::optional<std::filesystem::path> out;
  if (!o.out.empty()) out = o.out;
  const auto journal = pipeline::replay_session(input, analyzer, c.events, out);
  print(metrics::to_json(metrics::session_summary(journal)));
  return kExitOk;
}

int cmd_train(const Options& o) {
  const Config c = resolve_config(o);
  const auto data = load_dataset_or_default(o, c);
  if (data.empty()) throw InputError("train: dataset is empty");
  const auto model = affect::train(data, c.affect.hyperparams);
  if (!o.out.empty()) affect::save_model(o.out, model);
  auto report = affect::to_json(affect::evaluate(model, data));
  report["final_loss"] = model.training.final_loss;
  print(report);
  return kExitOk;
}

int cmd_eval(const Options& o) {
  const Config c = resolve_config(o);
  if (!c.affect.model) throw ConfigError("eval: no model (use --model or affect.model)");
  const auto data = load_dataset_or_default(o, c);
  if (data.empty()) throw InputError("eval: dataset is empty");
  affect::ClassifierModel model;
  try {
    model = affect::load_model(*c.affect.model);
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  print(affect::to_json(affect::evaluate(model, data)));
  return kExitOk;
}

review::ReviewServer* g_server = nullptr;

int cmd_serve(const Options& o) {
  const Config c = resolve_config(o);
  if (!std::filesystem::is_directory(c.storage.data_dir)) {
    throw InputError("serve: data directory " + c.storage.data_dir.string() + " does not exist");
  }
  review::ReviewService service(c.storage.data_dir);
  review::ReviewServer server(service);
  const int port = server.bind(c.service.bind, c.service.port);
  std::cerr << "serving " << c.storage.data_dir << " on http://" << c.service.bind << ":" << port << "/api/v1\n";
  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  server.listen();
  g_server = nullptr;
  return kExitOk;
}

int cmd_synth(const Options& o) {
  const Config c = resolve_config(o);
  if (o.out.empty()) throw InputError("synth: --out is required");
  const std::uint64_t seed = o.seed.value_or(1);
  std::string kind = o.kind;
  if (kind.empty()) kind = std::filesystem::path(o.out).extension() == ".agsj" ? "journal" : "scenario";
  if (kind == "dataset") {
    affect::save_dataset(o.out, synth::make_training_set(c.affect.train_per_class, c.affect.train_noise_sigma, seed));
  } else {
    const auto sc = o.scenario.empty() ? synth::random_scenario(seed) : synth::load_scenario(o.scenario);
    if (kind == "scenario") {
      std::ofstream f(o.out);
      f << synth::to_json(sc).dump(2) << "\n";
      if (!f) throw InputError("cannot write " + o.out);
    } else if (kind == "journal") {
      write_session(o.out, synth::recording_journal(synth::generate(sc), sc.duration));
    } else {
      throw InputError("synth: unknown --kind " + kind);
    }
  }
  print(Json{{"written", o.out}, {"kind", kind}, {"seed", seed}});
  return kExitOk;
}

int cmd_link_demo(const Options& o) {
  const Config c = resolve_config(o);
  pipeline::ReplayInput input;
  if (!o.scenario.empty()) {
    input = load_replay_input(o.scenario);
  } else {
    const auto sc = synth::random_scenario(o.seed.value_or(1));
    input = pipeline::replay_input(synth::recording_journal(synth::generate(sc), sc.duration));
  }
  const auto analyzer = make_analyzer(c);

  link::TcpListener listener(c.link.host, c.link.port);
  link::LinkOptions lo;
  if (!o.out.empty()) lo.journal_path = o.out;
  link::LinkSessionResult server_result;
  std::exception_ptr server_error;
  std::thread server([&] {
    try {
      auto conn = listener.accept(link::kLinkTimeout);
      server_result = link::run_link_session(*conn, analyzer, c.events, lo);
    } catch (...) {
      server_error = std::current_exception();
    }
  });

  link::DemoStreamOptions so;
  so.pace = o.pace;
  if (o.drop_after) so.drop_after = static_cast<Micros>(*o.drop_after * 1e6);
  link::DemoClientResult client;
  std::exception_ptr client_error;
  try {
    auto conn = link::tcp_connect(c.link.host, listener.port());
    client = link::run_demo_client(*conn, input, so);
  } catch (...) {
    client_error = std::current_exception();
  }
  server.join();
  if (server_error) std::rethrow_exception(server_error);
  if (client_error) std::rethrow_exception(client_error);

  const auto& s = server_result.stats;
  Json report{{"end", link::link_end_name(server_result.end)},
              {"frames", s.frames},
              {"heartbeats", s.heartbeats},
              {"dropped", s.dropped},
              {"errors_sent", s.errors_sent},
              {"decode_errors", s.decode_errors.size()},
              {"cues_sent", s.cues_sent},
              {"cues_received", client.cues.size()},
              {"latency_p50_ms", link::percentile(s.latency_ms, 50).value_or(0.0)},
              {"latency_p95_ms", link::percentile(s.latency_ms, 95).value_or(0.0)}};
  if (server_result.journal) {
    report["session_end_us"] = metrics::session_end_of(*server_result.journal);
    report["events"] = server_result.journal->collect<ExpressiveEvent>().size();
  }
  print(report);
  return server_result.journal ? kExitOk : kExitInput;
}

int cmd_metrics(const Options& o) {
  const Config c = resolve_config(o);
  if (!o.subject.empty()) {
    review::ReviewService service(c.storage.data_dir);
    const auto r = service.progress(o.subject);
    std::cout << Json::parse(r.body).dump(2) << "\n";
    return r.status == 200 ? kExitOk : kExitInput;
  }
  if (o.input.empty()) throw InputError("metrics: --input or --subject is required");
  SessionJournal j;
  try {
    j = read_session(o.input);
  } catch (const Error& e) {
    throw InputError(o.input + ": " + e.what());
  }
  print(metrics::to_json(metrics::session_summary(j)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Social-interaction aid pipeline: replay, training, review service and device link"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--seed", o.seed, "Seed for synthetic data and training");
  };

  auto* run = app.add_subcommand("run", "Replay a journal or scenario through the pipeline");
  common(run);
  run->add_option("--input", o.input, "Input journal (.agsj) or scenario (.json)")->required();
  run->add_option("--out", o.out, "Output journal");
  run->add_option("--model", o.model, "Classifier model file");

  auto* train = app.add_subcommand("train", "Train the expression classifier");
  common(train);
  train->add_option("--input", o.input, "Dataset JSON (default: synthetic set)");
  train->add_option("--out", o.out, "Model output path");

  auto* eval = app.add_subcommand("eval", "Evaluate a classifier on a dataset");
  common(eval);
  eval->add_option("--input", o.input, "Dataset JSON (default: synthetic set)");
  eval->add_option("--model", o.model, "Classifier model file");

  auto* serve = app.add_subcommand("serve", "Run the review HTTP API");
  common(serve);
  serve->add_option("--data-dir", o.data_dir, "Directory of session journals");
  serve->add_option("--bind", o.bind, "Bind address");
  serve->add_option("--port", o.port, "Port");

  auto* synth = app.add_subcommand("synth", "Generate synthetic scenarios, journals or datasets");
  common(synth);
  synth->add_option("--out", o.out, "Output path")->required();
  synth->add_option("--scenario", o.scenario, "Scenario to render instead of a random one");
  synth->add_option("--kind", o.kind, "scenario | journal | dataset (default from extension)");

  auto* demo = app.add_subcommand("link-demo", "Stream a scenario over local TCP through the link session");
  common(demo);
  demo->add_option("--scenario", o.scenario, "Scenario (.json) or journal (.agsj); random when absent");
  demo->add_option("--out", o.out, "Output journal");
  demo->add_option("--bind", o.bind, "Link host");
  demo->add_option("--port", o.port, "Link port (0 picks a free one)");
  demo->add_option("--drop-after", o.drop_after, "Stop sending after this many seconds of stream time");
  demo->add_option("--pace", o.pace, "Stream speed relative to real time (0 = unpaced)");

  auto* met = app.add_subcommand("metrics", "Session metrics or a subject's progress");
  common(met);
  met->add_option("--input", o.input, "Session journal");
  met->add_option("--data-dir", o.data_dir, "Directory of session journals");
  met->add_option("--subject", o.subject, "Subject for the progress series");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(o);
    if (*train) return cmd_train(o);
    if (*eval) return cmd_eval(o);
    if (*serve) return cmd_serve(o);
    if (*synth) return cmd_synth(o);
    if (*demo) return cmd_link_demo(o);
    if (*met) return cmd_metrics(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
