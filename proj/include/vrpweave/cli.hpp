#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vrpweave/aspect.hpp"
#include "vrpweave/diff.hpp"
#include "vrpweave/error.hpp"
#include "vrpweave/metrics.hpp"
#include "vrpweave/model_io.hpp"
#include "vrpweave/pointcut.hpp"
#include "vrpweave/weaver.hpp"

namespace vrp::cli {

enum ExitCode : int { kOk = 0, kDomainError = 1, kUsageError = 2 };

enum class Format { Text, Structured };

struct CliConfig {
  std::string model_path;
  std::vector<std::string> aspect_paths;
  std::vector<std::string> activations;
  std::vector<std::string> bindings;  // "vp=variant"
  std::string out_path;
  std::string tailored_path;
  Format format = Format::Text;
  bool only_implicit = false;
  bool only_explicit = false;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path);
}

class Printer {
 public:
  Printer(std::ostream& out, std::ostream& err, bool color) : out_(out), err_(err), color_(color) {}

  std::ostream& out() { return out_; }

  void error(const std::string& msg) { err_ << paint("error:", "31") << " " << msg << "\n"; }
  void warning(const std::string& msg) { err_ << paint("warning:", "33") << " " << msg << "\n"; }
  void diff_line(const std::string& line) {
    const char* code = line.rfind("+", 0) == 0 ? "32" : line.rfind("-", 0) == 0 ? "31" : "36";
    out_ << paint(line, code) << "\n";
  }

 private:
  std::string paint(const std::string& s, const char* code) const {
    return color_ ? "\x1b[" + std::string(code) + "m" + s + "\x1b[0m" : s;
  }

  std::ostream& out_;
  std::ostream& err_;
  bool color_;
};

struct Loaded {
  ProcessModel model;
  std::vector<ProcessAspect> aspects;
};

inline Loaded load_inputs(const CliConfig& cfg) {
  Loaded in;
  std::string model_text = read_file(cfg.model_path);
  std::vector<std::string> aspect_texts;
  for (const auto& p : cfg.aspect_paths) aspect_texts.push_back(read_file(p));
  in.model = load_model(model_text);
  for (const auto& t : aspect_texts) {
    auto more = parse_aspect_file(t);
    in.aspects.insert(in.aspects.end(), more.begin(), more.end());
  }
  check_aspects(in.aspects, in.model);
  return in;
}

inline std::vector<ManualBinding> parse_bindings(const std::vector<std::string>& raw) {
  std::vector<ManualBinding> out;
  for (const auto& b : raw) {
    auto eq = b.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == b.size()) {
      throw CLI::ValidationError("--bind", "expected <vp>=<variant>, got '" + b + "'");
    }
    out.push_back({b.substr(0, eq), b.substr(eq + 1)});
  }
  return out;
}

inline WeaveRequest make_request(const Loaded& in, const CliConfig& cfg) {
  WeaveRequest req;
  req.model = in.model;
  req.aspects = in.aspects;
  req.activations = cfg.activations;
  req.manual_bindings = parse_bindings(cfg.bindings);
  return req;
}

inline int cmd_validate(const CliConfig& cfg, Printer& p) {
  Loaded in = load_inputs(cfg);
  std::vector<const ProcessAspect*> all;
  for (const auto& a : in.aspects) all.push_back(&a);
  auto population = varpoint_population(in.model, all);
  std::size_t warnings = 0;
  for (const auto& a : in.aspects) {
    for (const auto& w : aspect_warnings(a)) {
      p.warning(w);
      ++warnings;
    }
    for (const auto& w : plan_aspect(a, in.model, population).warnings) {
      p.warning(w);
      ++warnings;
    }
  }
  std::size_t elements = 0;
  walk(in.model, [&](const ProcessElement&, std::string_view) { ++elements; });
  p.out() << "ok: process \"" << in.model.name << "\": " << elements << " elements, "
          << in.model.explicit_varpoints.size() << " explicit varpoints, "
          << derive_implicit_varpoints(in.model).size() << " implicit varpoints, "
          << in.aspects.size() << " aspects, " << warnings << " warnings\n";
  return kOk;
}

inline int cmd_list_vps(const CliConfig& cfg, Printer& p) {
  Loaded in = load_inputs(cfg);
  WeaveRequest req = make_request(in, cfg);
  auto population = varpoint_population(in.model, activated_aspects(req));
  bool want_implicit = cfg.only_implicit || !cfg.only_explicit;
  bool want_explicit = cfg.only_explicit || !cfg.only_implicit;
  for (const auto& vp : population) {
    if (vp.is_implicit ? !want_implicit : !want_explicit) continue;
    std::string owner = vp.owner.empty() ? "-" : vp.owner;
    const char* tag = vp.is_implicit ? "implicit" : "explicit";
    if (cfg.format == Format::Structured) {
      p.out() << "vp\t" << vp.name << "\t" << to_string(vp.kind) << "\t" << owner << "\t"
              << to_string(vp.policy) << "\t" << tag << "\n";
    } else {
      p.out() << vp.name << " " << to_string(vp.kind) << " " << owner << " "
              << to_string(vp.policy) << " [" << tag << "]\n";
    }
  }
  return kOk;
}

inline int cmd_tailor(const CliConfig& cfg, Printer& p) {
  Loaded in = load_inputs(cfg);
  TailoredProcess tp = weave(make_request(in, cfg));
  for (const auto& w : tp.warnings) p.warning(w);
  std::string text = serialize_model(tp.result);
  bool structured = cfg.format == Format::Structured;
  if (!cfg.out_path.empty()) {
    write_file(cfg.out_path, text);
  } else if (structured) {
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) p.out() << "model\t" << line << "\n";
  } else {
    p.out() << text << "\n";
  }
  if (structured) {
    p.out() << render_ledger_structured(tp) << render_report_structured(tp.report);
  } else {
    p.out() << "# ledger\n" << render_ledger_text(tp) << "# effort\n" << render_report_text(tp.report);
  }
  return kOk;
}

inline int cmd_diff(const CliConfig& cfg, Printer& p) {
  Loaded in = load_inputs(cfg);
  ProcessModel tailored;
  if (!cfg.tailored_path.empty()) {
    tailored = load_model(read_file(cfg.tailored_path));
  } else {
    TailoredProcess tp = weave(make_request(in, cfg));
    for (const auto& w : tp.warnings) p.warning(w);
    tailored = std::move(tp.result);
  }
  for (const auto& line : diff(in.model, tailored)) {
    if (cfg.format == Format::Structured) {
      p.out() << "diff\t" << line << "\n";
    } else {
      p.diff_line(line);
    }
  }
  return kOk;
}

inline int cmd_report(const CliConfig& cfg, Printer& p) {
  Loaded in = load_inputs(cfg);
  EffortReport r = effort_report(in.model, in.aspects);
  p.out() << (cfg.format == Format::Structured ? render_report_structured(r) : render_report_text(r));
  return kOk;
}

/// Runs the command line; `args` excludes the program name.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  const char* color_env = std::getenv("VRPWEAVE_COLOR");
  Printer printer(out, err, color_env != nullptr && std::string(color_env) == "1");

  CLI::App app{"Weave process aspects and variant bindings into a tailored process"};
  app.name("vrpweave");
  app.require_subcommand(1);
  CliConfig cfg;
  std::string format = "text";

  auto add_common = [&](CLI::App* sub, bool weaving) {
    sub->add_option("--model", cfg.model_path, "Process model document (.vrp)")->required();
    sub->add_option("--aspects", cfg.aspect_paths, "Aspect files (.pasp)");
    sub->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"text", "structured"}));
    if (weaving) {
      sub->add_option("--activate", cfg.activations, "Aspects to activate, in order");
      sub->add_option("--bind", cfg.bindings, "Manual binding <vp>=<variant>");
    }
  };

  auto* validate = app.add_subcommand("validate", "Load and check a model and its aspects");
  add_common(validate, false);
  auto* list = app.add_subcommand("list-vps", "List variation points in document order");
  add_common(list, false);
  list->add_option("--activate", cfg.activations, "Include VPs owned by these aspects");
  list->add_flag("--implicit", cfg.only_implicit, "Only implicit VPs");
  list->add_flag("--explicit", cfg.only_explicit, "Only explicit VPs");
  auto* tailor = app.add_subcommand("tailor", "Weave and write the tailored process");
  add_common(tailor, true);
  tailor->add_option("--out", cfg.out_path, "Output model path (default: stdout)");
  auto* diff_cmd = app.add_subcommand("diff", "Show changes the weave makes to the model");
  add_common(diff_cmd, true);
  diff_cmd->add_option("--tailored", cfg.tailored_path, "Compare against this model instead");
  auto* report = app.add_subcommand("report", "Tailoring effort with and without aspects");
  add_common(report, false);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }
  cfg.format = format == "structured" ? Format::Structured : Format::Text;

  try {
    if (validate->parsed()) return cmd_validate(cfg, printer);
    if (list->parsed()) return cmd_list_vps(cfg, printer);
    if (tailor->parsed()) return cmd_tailor(cfg, printer);
    if (diff_cmd->parsed()) return cmd_diff(cfg, printer);
    if (report->parsed()) return cmd_report(cfg, printer);
  } catch (const CLI::ValidationError& e) {
    printer.error(e.what());
    return kUsageError;
  } catch (const Error& e) {
    printer.error(e.what());
    return e.code() == ErrorCode::Io ? kUsageError : kDomainError;
  }
  return kUsageError;
}

}  // namespace vrp::cli
