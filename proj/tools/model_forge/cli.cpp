#include "cli.hpp"

#include "mforge/behavior.hpp"
#include "mforge/derivation.hpp"
#include "mforge/dot.hpp"
#include "mforge/store.hpp"
#include "mforge/validation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>

namespace mforge::cli {

namespace {

struct ValidateArgs {
    std::string model;
    std::string reference;
    bool strict = false;
};

struct DeriveArgs {
    std::string reference;
    std::string selection;
    std::string out;
    std::string id;
};

struct RunArgs {
    std::string specific;
    std::string reference;
    std::string params;
    std::vector<std::string> sets;
    bool interactive = false;
    std::string policy = "after";
};

struct ExportArgs {
    std::string model;
    std::string view;
    bool all = false;
    std::string out;
};

// Loads a model; returns nullopt after reporting. IO problems are usage-level
// (status 2), document problems are diagnostics (status 1).
std::optional<Model> load_or_report(const std::string& path, std::ostream& out, std::ostream& err, int& status) {
    try {
        return load_model(path);
    } catch (const Failure& f) {
        if (f.code() == codes::kIo) {
            err << "model-forge: cannot read " << path << "\n";
            status = kUsage;
        } else {
            out << render_diagnostic(f.as_diagnostic()) << "\n";
            status = kErrors;
        }
        return std::nullopt;
    }
}

int print_diagnostics(const Diagnostics& ds, bool strict, std::ostream& out) {
    for (const auto& d : ds) out << render_diagnostic(d) << "\n";
    if (has_errors(ds)) return kErrors;
    if (strict && !ds.empty()) return kErrors;
    return kOk;
}

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
    int status = kOk;
    auto model = load_or_report(a.model, out, err, status);
    if (!model) return status;
    if (a.reference.empty()) return print_diagnostics(validate_reference(*model), a.strict, out);

    auto reference = load_or_report(a.reference, out, err, status);
    if (!reference) return status;
    return print_diagnostics(validate_specific(*model, *reference), a.strict, out);
}

void print_coverage(const CoverageReport& report, std::ostream& out) {
    std::size_t width = 7;
    for (const auto& e : report.entries) width = std::max(width, e.service_id.size());
    out << std::left << std::setw(static_cast<int>(width) + 2) << "service" << std::setw(11) << "status"
        << "provider\n";
    for (const auto& e : report.entries) {
        std::string providers;
        for (const auto& p : e.present) providers += (providers.empty() ? "" : ", ") + p;
        out << std::left << std::setw(static_cast<int>(width) + 2) << e.service_id << std::setw(11)
            << to_string(e.status) << (providers.empty() ? "-" : providers) << "\n";
    }
    out << std::right << "complete: " << (report.complete ? "yes" : "no") << "\n";
}

int cmd_derive(const DeriveArgs& a, std::ostream& out, std::ostream& err) {
    int status = kOk;
    auto reference = load_or_report(a.reference, out, err, status);
    if (!reference) return status;

    Selection sel;
    try {
        sel = parse_selection(read_text_file(a.selection));
    } catch (const Failure& f) {
        if (f.code() == codes::kIo) {
            err << "model-forge: cannot read " << a.selection << "\n";
            return kUsage;
        }
        out << render_diagnostic(f.as_diagnostic()) << "\n";
        return kErrors;
    }

    const auto ref_diags = validate_reference(*reference);
    if (has_errors(ref_diags)) return print_diagnostics(ref_diags, false, out);

    const std::string id = a.id.empty() ? std::filesystem::path(a.out).stem().string() : a.id;
    Model specific;
    try {
        specific = derive_specific(*reference, sel, id);
    } catch (const Failure& f) {
        out << render_diagnostic(f.as_diagnostic()) << "\n";
        return kErrors;
    }

    try {
        save_model(specific, a.out);
    } catch (const Failure& f) {
        err << "model-forge: cannot write " << a.out << "\n";
        return kUsage;
    }
    print_coverage(completeness(specific, *reference), out);
    return kOk;
}

class ProgressPrinter final : public sim::EventSink {
public:
    explicit ProgressPrinter(std::ostream& out) : out_(out) {}

    void on_step(const sim::StepRecord& r) override {
        const auto& s = r.state;
        out_ << "t=" << s.t << "\n";
        out_ << "  p_desired=" << s.p_desired << " p_actual=" << s.p_actual << " p_deviation=" << s.p_deviation
             << "\n";
        out_ << "  v_active=" << s.v_active << " v_actual=" << s.v_actual;
        if (!r.classifications.empty()) out_ << " N=" << scalar_to_string(r.classifications.front().noise);
        out_ << "\n";
        for (const auto& c : r.classifications) {
            out_ << "  target " << c.j << ": s=" << scalar_to_string(c.s) << " -> "
                 << (c.decision == sim::Decision::Wanted ? "wanted" : "other")
                 << " (truth: " << (c.truth ? "wanted" : "other") << ")";
            if (c.error == sim::ErrorKind::FalsePositive) out_ << " FALSE POSITIVE";
            if (c.error == sim::ErrorKind::FalseNegative) out_ << " FALSE NEGATIVE";
            out_ << "\n";
        }
    }

    void on_report(const sim::ScoreReport& r) override {
        out_ << "false positives: " << r.fp_count;
        if (r.first_fp_t) out_ << " (first at t=" << *r.first_fp_t << ")";
        out_ << "\n";
        out_ << "false negatives: " << r.fn_count << "\n";
    }

private:
    std::ostream& out_;
};

int cmd_run(const RunArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
    int status = kOk;
    auto specific = load_or_report(a.specific, out, err, status);
    if (!specific) return status;
    auto reference = load_or_report(a.reference, out, err, status);
    if (!reference) return status;

    const auto diags = validate_specific(*specific, *reference);
    if (has_errors(diags)) return print_diagnostics(diags, false, out);

    try {
        const auto artifact = assemble_artifact(*specific, *reference);

        ParamValues values;
        if (!a.params.empty()) {
            std::string text;
            try {
                text = read_text_file(a.params);
            } catch (const Failure&) {
                err << "model-forge: cannot read " << a.params << "\n";
                return kUsage;
            }
            values = parse_param_file(text);
        }
        for (const auto& s : a.sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos || eq == 0) {
                err << "model-forge: --set expects name=value, got '" << s << "'\n";
                return kUsage;
            }
            values.insert_or_assign(s.substr(0, eq), parse_scalar_literal(s.substr(eq + 1)));
        }

        const auto current = [&](const ParamSpec& spec) -> std::optional<Scalar> {
            if (auto it = values.find(spec.name); it != values.end()) return it->second;
            return spec.default_value;
        };

        if (a.interactive) {
            for (const auto& spec : artifact.param_schema) {
                if (!spec.tunable) continue;
                const auto cur = current(spec);
                out << spec.name << " (" << to_string(spec.type) << ")";
                if (cur) out << " [" << scalar_to_string(*cur) << "]";
                out << ": " << std::flush;
                std::string line;
                if (!std::getline(in, line)) line.clear();
                while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
                if (!line.empty()) values.insert_or_assign(spec.name, parse_scalar_literal(line));
            }
        }

        const auto resolved = resolve_params(artifact, values);
        out << "variable simulation parameters:\n";
        for (const auto& spec : artifact.param_schema)
            if (spec.tunable) out << "  " << spec.name << " = " << scalar_to_string(resolved.at(spec.name)) << "\n";
        out << "constant simulation parameters:\n";
        for (const auto& spec : artifact.param_schema)
            if (!spec.tunable) out << "  " << spec.name << " = " << scalar_to_string(resolved.at(spec.name)) << "\n";

        RunOptions options;
        options.noise_onset = a.policy == "at" ? sim::NoiseOnset::AtActivation : sim::NoiseOnset::AfterActivation;
        ProgressPrinter printer(out);
        (void)run_artifact(artifact, resolved, &printer, options);
    } catch (const Failure& f) {
        out << render_diagnostic(f.as_diagnostic()) << "\n";
        return kErrors;
    }
    return kOk;
}

int cmd_export(const ExportArgs& a, std::ostream& out, std::ostream& err) {
    int status = kOk;
    auto model = load_or_report(a.model, out, err, status);
    if (!model) return status;

    std::string dot;
    if (a.all) {
        dot = export_all_dot(*model);
    } else {
        const View* v = model->find_view(a.view);
        if (v == nullptr) {
            err << "model-forge: model '" << model->id << "' has no view '" << a.view << "'\n";
            return kErrors;
        }
        dot = export_view_dot(*model, *v);
    }
    try {
        write_text_file(a.out, dot);
    } catch (const Failure&) {
        err << "model-forge: cannot write " << a.out << "\n";
        return kUsage;
    }
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Validate, derive, run and export layered architecture models", "model-forge"};
    app.require_subcommand(1);

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "Check a reference model, or a specific model against its reference");
    validate->add_option("model", va.model, "Model file")->required();
    validate->add_option("reference", va.reference, "Reference model (validates MODEL as a specific model)");
    validate->add_flag("--strict", va.strict, "Treat warnings as errors");

    DeriveArgs da;
    auto* derive = app.add_subcommand("derive", "Instantiate a specific model from a selection");
    derive->add_option("reference", da.reference, "Reference model")->required();
    derive->add_option("selection", da.selection, "Selection file")->required();
    derive->add_option("out", da.out, "Output path for the specific model")->required();
    derive->add_option("--id", da.id, "Model id (defaults to the output file stem)");

    RunArgs ra;
    auto* run_cmd = app.add_subcommand("run", "Assemble and run the executable artifact of a specific model");
    run_cmd->add_option("specific", ra.specific, "Specific model")->required();
    run_cmd->add_option("reference", ra.reference, "Reference model")->required();
    run_cmd->add_option("--params", ra.params, "JSON file of parameter values");
    run_cmd->add_option("--set", ra.sets, "Override one parameter (name=value); repeatable")->allow_extra_args(false)->take_all();
    run_cmd->add_flag("--interactive", ra.interactive, "Prompt for tunable parameters");
    run_cmd->add_option("--policy", ra.policy, "Noise onset: after (t > t_i) or at (t >= t_i)")
        ->check(CLI::IsMember({"at", "after"}));

    ExportArgs ea;
    auto* export_cmd = app.add_subcommand("export", "Write views as Graphviz DOT");
    export_cmd->add_option("model", ea.model, "Model file")->required();
    export_cmd->add_option("out", ea.out, "Output DOT file")->required();
    auto* view_opt = export_cmd->add_option("--view", ea.view, "View name");
    auto* all_opt = export_cmd->add_flag("--all", ea.all, "Export every view");
    view_opt->excludes(all_opt);
    export_cmd->callback([&] {
        if (!ea.all && ea.view.empty()) throw CLI::RequiredError("--view or --all");
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Error& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    if (validate->parsed()) return cmd_validate(va, out, err);
    if (derive->parsed()) return cmd_derive(da, out, err);
    if (run_cmd->parsed()) return cmd_run(ra, in, out, err);
    if (export_cmd->parsed()) return cmd_export(ea, out, err);
    return kUsage;
}

} // namespace mforge::cli
