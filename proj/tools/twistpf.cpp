#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <twistpf/io.hpp>

namespace {

// Shared flag block; every subcommand takes the same job description.
void attach_common(CLI::App* cmd, twistpf::JobSpec& job, std::string& format,
                   std::vector<std::string>& sets, bool needs_graph) {
    cmd->add_option("--graph", job.graph_path, "graph description file")->required(needs_graph);
    cmd->add_option("--delta", job.delta, "half-integer shift numerator: exponents use delta - eps");
    cmd->add_option("--nu", job.nu, "propagator powers, one per edge (default: all 1)")->delimiter(',');
    cmd->add_option("--mu", job.mu, "analytic regulator weights, one per edge (default: all 0)")
        ->delimiter(',');
    cmd->add_option("--t", job.t_name, "deformation variable name (default: t)");
    cmd->add_option("--set", sets, "bind a parameter, e.g. --set psq=t*m1^2 (repeatable)");
    cmd->add_option("--max-order", job.max_order, "stop the search after this order (0 = automatic)");
    cmd->add_option("--threads", job.threads, "worker threads for the linear algebra")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--emit-certificate", job.emit_certificate, "write the exactness certificate here");
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "structured"}));
}

bool split_sets(const std::vector<std::string>& raw, twistpf::JobSpec& job, std::ostream& err) {
    for (const auto& s : raw) {
        auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            err << "error: --set expects name=expression, got '" << s << "'\n";
            return false;
        }
        job.sets.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"twisted Griffiths-Dwork reduction for regulated Feynman integrals"};
    app.require_subcommand(1);

    twistpf::JobSpec job;
    std::string format = "text";
    std::vector<std::string> sets;
    std::string certificate_path;

    CLI::App* polys = app.add_subcommand("polys", "print the graph polynomials U, V, F");
    attach_common(polys, job, format, sets, true);

    CLI::App* op = app.add_subcommand("operator", "compute the minimal operator and its certificate");
    attach_common(op, job, format, sets, true);

    CLI::App* singular = app.add_subcommand("singular", "compute the operator and report its singular locus");
    attach_common(singular, job, format, sets, true);

    CLI::App* verify = app.add_subcommand("verify", "replay an emitted certificate");
    verify->add_option("certificate", certificate_path, "certificate JSON file")->required();
    verify->add_option("--format", format, "output format")->check(CLI::IsMember({"text", "structured"}));

    CLI11_PARSE(app, argc, argv);

    if (!split_sets(sets, job, std::cerr)) return 1;
    job.structured = (format == "structured");
    job.certificate_path = certificate_path;
    if (polys->parsed()) job.command = twistpf::Command::polys;
    if (op->parsed()) job.command = twistpf::Command::op;
    if (singular->parsed()) job.command = twistpf::Command::singular;
    if (verify->parsed()) job.command = twistpf::Command::verify;

    return twistpf::run(job, std::cout, std::cerr);
}
