#include "knead/circle.hpp"
#include "knead/error.hpp"
#include "knead/subshift.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace knead;
using nlohmann::json;

namespace {

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) raise("domain", "cannot open output file: " + out_path);
    out << text << "\n";
}

void put_enclosure(json& j, const std::string& lo_key, const std::string& hi_key, const Enclosure& e,
                   int digits = 15) {
    j[lo_key] = to_fraction_string(e.lo);
    j[hi_key] = to_fraction_string(e.hi);
    j[lo_key + "_decimal"] = to_decimal_string(e.lo, digits, false);
    j[hi_key + "_decimal"] = to_decimal_string(e.hi, digits, true);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise("domain", "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct DimFlags {
    int m = 1;
    std::string c, d;
    std::string tol = "1e-3";
    std::string format = "json";
    int cap = 0;
};

json run_dim(const DimFlags& fl) {
    if (fl.format != "json") raise("domain", "dim emits json");
    IntervalConstraint ic = IntervalConstraint::make(parse_seq(fl.c, fl.m), parse_seq(fl.d, fl.m));
    DimensionOptions opt;
    opt.tol = parse_rational(fl.tol);
    opt.k_cap = fl.cap;
    DimensionResult r = dimension(ic, opt);
    json j;
    j["command"] = "dim";
    j["m"] = fl.m;
    j["c"] = format_seq(ic.c);
    j["d"] = format_seq(ic.d);
    j["tol"] = to_fraction_string(opt.tol);
    j["classification"] = to_string(r.cls);
    put_enclosure(j, "lower", "upper", r.value);
    j["k"] = r.k_reached;
    j["converged"] = r.converged;
    return j;
}

int run_phi_curve(int m, const std::string& fixed_c, const std::string& fixed_d, const std::string& vary,
                  int len, const std::string& tol, int cap, const std::string& out_path) {
    if (vary != "c" && vary != "d") raise("domain", "--vary must be c or d");
    if (len < 1 || len > 16) raise("domain", "--len must be in 1..16");
    const Seq fixed = (vary == "d") ? parse_seq(fixed_c, m) : parse_seq(fixed_d, m);
    DimensionOptions opt;
    opt.tol = parse_rational(tol);
    opt.k_cap = cap;

    std::ostringstream csv;
    csv << "literal,endpoint,lower,upper,k,converged,classification,error\n";
    const std::uint64_t base = static_cast<std::uint64_t>(m) + 1;
    std::uint64_t total = 1;
    for (int i = 0; i < len; ++i) total *= base;
    for (std::uint64_t code = 0; code < total; ++code) {
        Word w = decode_word(code, m, len);
        Seq var = Seq::make(m, w.syms, {});
        // numeric position of the grid point under x -> (m+1)x mod 1
        Rational endpoint(0);
        {
            Rational p(1);
            for (int s : w.syms) {
                p /= static_cast<long>(base);
                endpoint += Rational(s) * p;
            }
        }
        csv << format_seq(var) << "," << to_decimal_string(endpoint, 12, false) << ",";
        try {
            Seq c = (vary == "d") ? fixed : var;
            Seq d = (vary == "d") ? var : fixed;
            IntervalConstraint ic = IntervalConstraint::make(c, d);
            DimensionResult r = dimension(ic, opt);
            csv << to_decimal_string(r.value.lo, 12, false) << "," << to_decimal_string(r.value.hi, 12, true)
                << "," << r.k_reached << "," << (r.converged ? "true" : "false") << "," << to_string(r.cls)
                << ",\n";
        } catch (const Error& e) {
            csv << ",,,,," << e.code() << ": " << e.what() << "\n";
        }
    }
    emit(csv.str(), out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified dimension bounds for survivor sets of expanding circle maps"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string out_path;
    app.add_option("--out", out_path, "write output to a file instead of stdout");

    // dim
    DimFlags dim_fl;
    CLI::App* dim_cmd = app.add_subcommand("dim", "certified dimension enclosure of a survivor set");
    dim_cmd->fallthrough();
    dim_cmd->add_option("--m", dim_fl.m, "alphabet bound (symbols 0..m)")->required();
    dim_cmd->add_option("--c", dim_fl.c, "left endpoint literal")->required();
    dim_cmd->add_option("--d", dim_fl.d, "right endpoint literal")->required();
    dim_cmd->add_option("--tol", dim_fl.tol, "target enclosure width (default 1e-3)");
    dim_cmd->add_option("--cap", dim_fl.cap, "depth cap (default by alphabet)");
    dim_cmd->add_option("--format", dim_fl.format, "json (default)");

    // phi-curve
    int pc_m = 1, pc_len = 6, pc_cap = 0;
    std::string pc_c = "(0)", pc_d = "(1)", pc_vary = "d", pc_tol = "1e-3", pc_format = "csv";
    CLI::App* pc_cmd = app.add_subcommand("phi-curve", "dimension staircase over a grid of endpoints (CSV)");
    pc_cmd->fallthrough();
    pc_cmd->add_option("--m", pc_m)->required();
    pc_cmd->add_option("--c", pc_c, "fixed left endpoint (when varying d)");
    pc_cmd->add_option("--d", pc_d, "fixed right endpoint (when varying c)");
    pc_cmd->add_option("--vary", pc_vary, "which endpoint runs over the grid: c or d");
    pc_cmd->add_option("--len", pc_len, "grid words have this length, extended by 0^inf");
    pc_cmd->add_option("--tol", pc_tol);
    pc_cmd->add_option("--cap", pc_cap);
    pc_cmd->add_option("--format", pc_format, "csv (default)");

    // kneading check|minimal-above|stability
    CLI::App* kn_cmd = app.add_subcommand("kneading", "kneading predicates and constructions");
    kn_cmd->fallthrough();
    int kn_m = 1;
    std::string kn_literal;
    CLI::App* kn_check = kn_cmd->add_subcommand("check", "is the sequence kneading?");
    CLI::App* kn_min = kn_cmd->add_subcommand("minimal-above", "least kneading sequence above");
    CLI::App* kn_stab = kn_cmd->add_subcommand("stability", "left-endpoint stability prefix and radius");
    for (CLI::App* sub : {kn_check, kn_min, kn_stab}) {
        sub->fallthrough();
        sub->add_option("literal", kn_literal, "sequence literal")->required();
        sub->add_option("--m", kn_m, "alphabet bound (default 1)");
    }
    kn_cmd->require_subcommand(1);

    // beta expand|solve
    CLI::App* beta_cmd = app.add_subcommand("beta", "expansions of 1 and their bases");
    beta_cmd->fallthrough();
    std::string be_beta = "2", be_literal, be_tol = "1e-12";
    int be_digits = 16, be_m = 1;
    CLI::App* be_expand = beta_cmd->add_subcommand("expand", "greedy digits of the expansion of 1");
    be_expand->fallthrough();
    be_expand->add_option("--beta", be_beta, "rational base, or lo,hi for an enclosure")->required();
    be_expand->add_option("--digits", be_digits, "digit count");
    CLI::App* be_solve = beta_cmd->add_subcommand("solve", "base whose expansion of 1 is the literal");
    be_solve->fallthrough();
    be_solve->add_option("literal", be_literal)->required();
    be_solve->add_option("--m", be_m);
    be_solve->add_option("--tol", be_tol);
    beta_cmd->require_subcommand(1);

    // joint-check
    CLI::App* jc_cmd = app.add_subcommand("joint-check", "does (f+eps)(K) meet K for the target SFT?");
    jc_cmd->fallthrough();
    std::string jc_map, jc_eps = "0", jc_c, jc_d;
    std::vector<std::string> jc_forbid;
    int jc_depth = 8, jc_period = 8;
    jc_cmd->add_option("--map", jc_map, "map definition JSON file (default: doubling map)");
    jc_cmd->add_option("--forbid", jc_forbid, "forbidden word of the target SFT (repeatable)");
    jc_cmd->add_option("--target-c", jc_c, "target as a survivor interval: left endpoint");
    jc_cmd->add_option("--target-d", jc_d, "target as a survivor interval: right endpoint");
    jc_cmd->add_option("--eps", jc_eps, "rigid rotation, exact rational")->required();
    jc_cmd->add_option("--depth", jc_depth, "cover depth");
    jc_cmd->add_option("--max-period", jc_period, "periodic-point search bound");
    bool jc_covers = false;
    jc_cmd->add_flag("--covers", jc_covers, "include the cover and its image in the output");

    // sft
    CLI::App* sft_cmd = app.add_subcommand("sft", "emit a transfer graph in the adjacency-list format");
    sft_cmd->fallthrough();
    int sf_m = 1, sf_k = 4;
    std::string sf_c, sf_d;
    bool sf_inner = false;
    sft_cmd->add_option("--m", sf_m)->required();
    sft_cmd->add_option("--c", sf_c)->required();
    sft_cmd->add_option("--d", sf_d)->required();
    sft_cmd->add_option("--k", sf_k, "block length");
    sft_cmd->add_flag("--inner", sf_inner, "strict (inner) truncation instead of the outer one");
    std::string sf_entropy_tol;
    sft_cmd->add_option("--entropy", sf_entropy_tol,
                        "emit the certified entropy enclosure (JSON) at this tolerance instead of the graph");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        json j;
        j["error"] = {{"code", "usage"}, {"message", e.what()}};
        std::cout << j.dump() << "\n";
        return 2;
    }

    try {
        if (*dim_cmd) {
            emit(run_dim(dim_fl).dump(), out_path);
        } else if (*pc_cmd) {
            if (pc_format != "csv") raise("domain", "phi-curve emits csv");
            return run_phi_curve(pc_m, pc_c, pc_d, pc_vary, pc_len, pc_tol, pc_cap, out_path);
        } else if (*kn_cmd) {
            Seq s = parse_seq(kn_literal, kn_m);
            json j;
            j["m"] = kn_m;
            if (*kn_check) {
                j["command"] = "kneading-check";
                j["literal"] = format_seq(s);
                j["kneading"] = is_kneading(s);
            } else if (*kn_min) {
                j["command"] = "kneading-minimal-above";
                j["input"] = format_seq(s);
                j["result"] = format_seq(minimal_kneading_above(s));
            } else {
                StabilityInfo st = left_endpoint_stability(s);
                j["command"] = "kneading-stability";
                j["literal"] = format_seq(s);
                j["i0"] = st.i0;
                j["radius"] = to_fraction_string(st.radius);
            }
            emit(j.dump(), out_path);
        } else if (*beta_cmd) {
            json j;
            if (*be_expand) {
                Enclosure beta;
                auto comma = be_beta.find(',');
                if (comma == std::string::npos) {
                    beta = Enclosure::point(parse_rational(be_beta));
                } else {
                    beta = Enclosure(parse_rational(be_beta.substr(0, comma)),
                                     parse_rational(be_beta.substr(comma + 1)));
                }
                ExpansionDigits d = beta_expand_one(beta, static_cast<std::size_t>(be_digits));
                std::string digits;
                for (std::size_t i = 0; i < d.digits.size(); ++i) {
                    if (i && beta.hi >= 10) digits += ",";
                    digits += std::to_string(d.digits[i]);
                }
                j["command"] = "beta-expand";
                j["beta"] = be_beta;
                j["digits"] = digits;
                j["truncated"] = d.truncated;
            } else {
                Seq s = parse_seq(be_literal, be_m);
                Enclosure beta = beta_from_kneading(s, parse_rational(be_tol));
                j["command"] = "beta-solve";
                j["m"] = be_m;
                j["literal"] = format_seq(s);
                put_enclosure(j, "beta_lo", "beta_hi", beta, 20);
            }
            emit(j.dump(), out_path);
        } else if (*jc_cmd) {
            PiecewiseLinearMarkovMap f = jc_map.empty()
                                             ? PiecewiseLinearMarkovMap::doubling()
                                             : PiecewiseLinearMarkovMap::from_json(read_file(jc_map));
            TransferGraph target;
            if (!jc_forbid.empty()) {
                const int m = f.alphabet_bound();
                std::vector<Word> forbidden;
                for (const std::string& lit : jc_forbid) {
                    // raw digits, no sequence canonicalization: "10" forbids
                    // the two-symbol factor, not its trimmed form
                    Word w{m, {}};
                    if (m <= 9) {
                        for (char ch : lit) {
                            if (ch < '0' || ch > '9') raise("syntax", "--forbid takes digit words");
                            w.syms.push_back(ch - '0');
                        }
                    } else {
                        std::size_t pos = 0;
                        while (pos < lit.size()) {
                            std::size_t comma = lit.find(',', pos);
                            std::string tok =
                                lit.substr(pos, comma == std::string::npos ? lit.size() - pos : comma - pos);
                            w.syms.push_back(std::stoi(tok));
                            if (comma == std::string::npos) break;
                            pos = comma + 1;
                        }
                    }
                    if (w.syms.empty()) raise("syntax", "--forbid needs a nonempty word");
                    for (int s : w.syms) {
                        if (s < 0 || s > m) raise("out_of_range", "--forbid symbol outside the map alphabet");
                    }
                    forbidden.push_back(std::move(w));
                }
                target = from_forbidden_words(m, forbidden);
            } else if (!jc_c.empty() && !jc_d.empty()) {
                IntervalConstraint ic = IntervalConstraint::make(parse_seq(jc_c, f.alphabet_bound()),
                                                                 parse_seq(jc_d, f.alphabet_bound()));
                target = outer_sft(ic, std::min(jc_depth, 8));
            } else {
                raise("domain", "target SFT needs --forbid words or --target-c/--target-d");
            }
            JointResult r = joint_check(f, target, parse_rational(jc_eps), jc_depth, jc_period);
            json j;
            j["command"] = "joint-check";
            j["eps"] = to_fraction_string(parse_rational(jc_eps));
            j["depth"] = jc_depth;
            j["verdict"] = to_string(r.verdict);
            if (jc_covers) {
                TransferGraph refined = trimmed(jc_depth > target.k ? refine(target, jc_depth) : target);
                IntervalCover cov = sft_cover(f, refined);
                j["cover"] = json::parse(cov.to_json());
                j["image"] = json::parse(map_image_cover(f, parse_rational(jc_eps), cov).to_json());
            }
            if (r.gap) {
                j["gap"] = to_fraction_string(*r.gap);
                j["gap_decimal"] = to_decimal_string(*r.gap, 12, false);
            }
            if (r.witness_point) {
                j["witness"] = to_fraction_string(*r.witness_point);
                j["witness_preimage"] = to_fraction_string(*r.witness_preimage);
            }
            emit(j.dump(), out_path);
        } else if (*sft_cmd) {
            IntervalConstraint ic =
                IntervalConstraint::make(parse_seq(sf_c, sf_m), parse_seq(sf_d, sf_m));
            TransferGraph g = sf_inner ? inner_sft(ic, sf_k) : outer_sft(ic, sf_k);
            if (!sf_entropy_tol.empty()) {
                EntropyEnclosure e = perron_enclosure(g, parse_rational(sf_entropy_tol));
                json j = json::parse(format_enclosure_json(e.value));
                j["graph_size"] = e.graph_size;
                j["k"] = e.k;
                emit(j.dump(), out_path);
            } else {
                emit(serialize_graph(g), out_path);
            }
        }
    } catch (const Error& e) {
        json j;
        j["error"] = {{"code", e.code()}, {"message", e.what()}};
        std::cout << j.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        json j;
        j["error"] = {{"code", "internal"}, {"message", e.what()}};
        std::cout << j.dump() << "\n";
        return 1;
    }
    return 0;
}
