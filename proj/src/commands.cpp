#include "pedflow/commands.hpp"

#include <cstdlib>
#include <ostream>

#include "pedflow/csv_io.hpp"
#include "pedflow/errors.hpp"
#include "pedflow/macro_solver.hpp"
#include "pedflow/metrics.hpp"
#include "pedflow/micro_sim.hpp"
#include "pedflow/scenario.hpp"

namespace pedflow {

namespace fs = std::filesystem;

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c == '\n' ? ' ' : c);
  }
  return out;
}

fs::path output_dir(const CommandOptions& options, const Scenario& scenario) {
  if (options.out) return *options.out;
  if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') return env;
  return scenario.output;
}

Scenario prepare(const CommandOptions& options) {
  Scenario s = load_scenario(options.scenario);
  if (options.seed) s.seed = *options.seed;
  if (options.snapshots) s.snapshots = *options.snapshots;
  s.validate();
  return s;
}

void print_crossing(std::ostream& out, const ComparisonReport& report) {
  for (const CrossingSummary& c : report.crossing) {
    out << "crossing cut=" << format_number(c.cut)
        << " macro=" << (c.macro ? format_number(*c.macro) : std::string("not_reached"))
        << " micro_mean=" << (c.micro_mean ? format_number(*c.micro_mean) : std::string("not_reached"))
        << " micro_reached=" << c.micro_reached << "/" << c.micro_total << "\n";
  }
}

int dispatch(const CommandOptions& options, std::ostream& out) {
  const Scenario scenario = prepare(options);
  if (options.subcommand == "validate") {
    out << "ok scenario=" << scenario.name << " micro_dt=" << format_number(scenario.micro_dt())
        << " sup_rate=" << format_number(scenario.rates.sup_bound()) << "\n";
    return kExitOk;
  }

  const fs::path dir = output_dir(options, scenario);
  fs::create_directories(dir);
  const EnsembleOptions ensemble_options{options.workers};

  if (options.subcommand == "micro") {
    const EnsembleResult micro = run_ensemble(scenario, ensemble_options);
    write_micro_snapshots(dir, micro);
    write_micro_statistics(dir, micro);
    out << "micro done replicates=" << micro.replicates << " projections=" << micro.projections
        << " out=" << dir.string() << "\n";
    return kExitOk;
  }
  if (options.subcommand == "macro") {
    const MacroRun macro = run_macro(scenario);
    write_macro_snapshots(dir, macro);
    write_macro_diagnostics(dir, macro, scenario.cuts);
    out << "macro done steps=" << macro.diagnostics.size() - 1 << " out=" << dir.string() << "\n";
    return kExitOk;
  }
  if (options.subcommand == "compare") {
    const EnsembleResult micro = run_ensemble(scenario, ensemble_options);
    const MacroRun macro = run_macro(scenario);
    const ComparisonReport report = compare_runs(micro, macro);
    write_micro_snapshots(dir, micro);
    write_micro_statistics(dir, micro);
    write_macro_snapshots(dir, macro);
    write_macro_diagnostics(dir, macro, scenario.cuts);
    write_comparison(dir, report);
    for (std::size_t s = 0; s < report.times.size(); ++s) {
      out << "t=" << format_number(report.times[s]) << " l1=" << format_number(report.l1[s])
          << " l2=" << format_number(report.l2[s]) << "\n";
    }
    print_crossing(out, report);
    return kExitOk;
  }
  throw ConfigError("unknown subcommand '" + options.subcommand + "'");
}

}  // namespace

int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(options, out);
  } catch (const ConfigError& e) {
    err << "error kind=validation message=\"" << escape(e.what()) << "\"\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "error kind=validation message=\"" << escape(e.what()) << "\"\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error kind=runtime message=\"" << escape(e.what()) << "\"\n";
    return kExitRuntime;
  }
}

}  // namespace pedflow
