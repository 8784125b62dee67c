#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "fpr/attendance.hpp"
#include "fpr/image.hpp"
#include "fpr/matching.hpp"
#include "fpr/minutiae.hpp"
#include "fpr/orientation.hpp"
#include "fpr/phase.hpp"
#include "fpr/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitReject = 1;
constexpr int kExitError = 2;

fpr::FieldKind parse_field(const std::string& s) {
    const auto colon = s.find(':');
    const std::string kind = s.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (kind == "constant") {
        return fpr::FieldKind::constant(args.empty() ? 0.0 : std::stod(args));
    }
    if (kind == "arch") {
        const auto comma = args.find(',');
        if (comma == std::string::npos)
            throw fpr::Error("arch field needs amplitude,wavelength");
        return fpr::FieldKind::arch(std::stod(args.substr(0, comma)), std::stod(args.substr(comma + 1)));
    }
    throw fpr::Error("unknown field kind '" + kind + "' (want constant:T or arch:A,W)");
}

fpr::Timestamp now_or_parse(const std::string& now_flag) {
    if (now_flag.empty()) return static_cast<fpr::Timestamp>(std::time(nullptr));
    return fpr::parse_timestamp(now_flag);
}

std::string default_registry_root(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("REGISTRY_ROOT")) return env;
    throw fpr::Error("no registry root: pass --root or set REGISTRY_ROOT");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw fpr::IoFailure("cannot open " + path + " for writing");
    out << text;
}

std::string dump_phase_text(const fpr::PhaseImage& cont, const fpr::PhaseImage& spiral) {
    std::string out;
    char buf[32];
    for (int y = 0; y < spiral.height; ++y) {
        for (int x = 0; x < spiral.width; ++x) {
            const bool fg = cont.mask.pixel(x, y);
            std::snprintf(buf, sizeof buf, "%s%.4f", x ? " " : "",
                          fg ? cont.at(x, y) + spiral.at(x, y) : 0.0);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& ext) {
    std::vector<fs::path> files;
    if (!fs::is_directory(dir)) return files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ext)
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

int run(int argc, char** argv) {
    CLI::App app{"Fingerprint reconstruction, matching, and attendance toolkit"};
    app.require_subcommand(1);

    // --- synth ---
    auto* synth = app.add_subcommand("synth", "Generate a synthetic fingerprint");
    int sw = 300, sh = 300, sminutiae = 12;
    std::uint64_t sseed = 0;
    double sfreq = 1.0 / 9.0;
    std::string sfield = "constant:0.0", sout_image, sout_template;
    synth->add_option("--width", sw);
    synth->add_option("--height", sh);
    synth->add_option("--field", sfield, "constant:THETA or arch:AMPLITUDE,WAVELENGTH");
    synth->add_option("--minutiae", sminutiae);
    synth->add_option("--seed", sseed);
    synth->add_option("--freq", sfreq, "ridge frequency, cycles/pixel");
    synth->add_option("--out-image", sout_image)->required();
    synth->add_option("--out-template", sout_template)->required();
    synth->callback([&] {
        const auto spec = fpr::random_spec(sw, sh, parse_field(sfield), sminutiae, sseed,
                                           fpr::FrequencyMap{sfreq});
        const auto out = fpr::generate(spec);
        fpr::write_pgm(out.image, sout_image);
        fpr::write_template(out.ground_truth, sout_template);
        std::cout << "minutiae=" << out.ground_truth.size() << "\n";
    });

    // --- extract ---
    auto* extract = app.add_subcommand("extract", "Extract a minutiae template from a PGM image");
    std::string ein, eout;
    double evar = 100.0, emargin = 10.0, esep = 5.0;
    bool eno_equalize = false;
    extract->add_option("--image", ein)->required();
    extract->add_option("--out", eout)->required();
    extract->add_option("--variance-threshold", evar);
    extract->add_option("--border-margin", emargin);
    extract->add_option("--min-separation", esep);
    extract->add_flag("--no-equalize", eno_equalize, "skip histogram equalization");
    extract->callback([&] {
        fpr::GrayImage img = fpr::read_pgm(ein);
        const fpr::ForegroundMask mask = fpr::segment(img, evar);
        if (!eno_equalize) img = fpr::equalize_histogram(img);
        const fpr::Template t = fpr::extract_minutiae(img, mask, emargin, esep);
        fpr::write_template(t, eout);
        std::cout << "minutiae=" << t.size() << "\n";
    });

    // --- reconstruct ---
    auto* recon = app.add_subcommand("reconstruct", "Reconstruct a fingerprint image from a template");
    std::string rtemplate, rout, rdump_phase, rdump_orientation;
    double rfreq = 1.0 / 9.0;
    bool rfull_frame = false;
    recon->add_option("--template", rtemplate)->required();
    recon->add_option("--out", rout)->required();
    recon->add_option("--freq", rfreq);
    recon->add_flag("--full-frame", rfull_frame, "use the whole frame as foreground");
    recon->add_option("--dump-phase", rdump_phase, "write per-pixel composite phase as text");
    recon->add_option("--dump-orientation", rdump_orientation, "write the blockwise orientation grid as text");
    recon->callback([&] {
        const fpr::Template t = fpr::read_template(rtemplate);
        const fpr::FrequencyMap freq{rfreq};
        const fpr::ForegroundMask mask =
            rfull_frame ? fpr::full_frame_mask(t.width, t.height) : fpr::hull_mask(t);
        const fpr::OrientationField field = fpr::field_from_minutiae(t, mask);
        const fpr::PhaseImage cont = fpr::continuous_phase(field, freq);
        const fpr::PhaseImage spiral = fpr::spiral_phase(t, t.width, t.height);
        fpr::write_pgm(fpr::compose_and_render(cont, spiral), rout);
        if (!rdump_phase.empty()) write_text(rdump_phase, dump_phase_text(cont, spiral));
        if (!rdump_orientation.empty()) write_text(rdump_orientation, fpr::dump_field(field));
    });

    // --- match ---
    auto* match_cmd = app.add_subcommand("match", "Match two minutiae templates");
    std::string mref, mquery;
    fpr::MatchParams mparams;
    double mthreshold = 0.25;
    match_cmd->add_option("--ref", mref)->required();
    match_cmd->add_option("--query", mquery)->required();
    match_cmd->add_option("--r0", mparams.r0, "pairing distance gate, px");
    match_cmd->add_option("--a0", mparams.a0, "direction gate, radians");
    match_cmd->add_option("--threshold", mthreshold);
    int match_exit = kExitOk;
    match_cmd->callback([&] {
        const fpr::MatchResult r =
            fpr::match(fpr::read_template(mref), fpr::read_template(mquery), mparams);
        const bool accept = fpr::decide(r, mthreshold);
        std::printf("score=%.6f paired=%d decision=%s\n", r.score, r.paired,
                    accept ? "accept" : "reject");
        match_exit = accept ? kExitOk : kExitReject;
    });

    // --- attack-eval ---
    auto* attack = app.add_subcommand("attack-eval", "Type-I/type-II masquerade attack evaluation");
    std::string adir, aout;
    double athreshold = 0.25, afreq = 1.0 / 9.0;
    fpr::MatchParams aparams;
    attack->add_option("--dir", adir, "data dir: originals/*.txt and impressions/<name>/*.txt")->required();
    attack->add_option("--threshold", athreshold);
    attack->add_option("--out", aout, "CSV output path");
    attack->add_option("--r0", aparams.r0);
    attack->add_option("--a0", aparams.a0);
    attack->add_option("--freq", afreq);
    attack->callback([&] {
        std::vector<fpr::Template> originals;
        std::map<size_t, std::vector<fpr::Template>> impressions;
        const auto files = sorted_files(fs::path(adir) / "originals", ".txt");
        if (files.empty()) throw fpr::EmptyInput("no originals in " + adir + "/originals");
        for (const auto& f : files) {
            const size_t idx = originals.size();
            originals.push_back(fpr::read_template(f.string()));
            for (const auto& imp : sorted_files(fs::path(adir) / "impressions" / f.stem(), ".txt"))
                impressions[idx].push_back(fpr::read_template(imp.string()));
        }
        const auto result =
            fpr::attack_eval(originals, impressions, athreshold, aparams, fpr::FrequencyMap{afreq});
        const std::string csv = fpr::attack_report_csv(result);
        if (!aout.empty()) write_text(aout, csv);
        std::cout << csv;
    });

    // --- enroll ---
    auto* enroll = app.add_subcommand("enroll", "Enroll a template under a roll number");
    std::string nroot, nroll, ntemplate, nnow;
    enroll->add_option("--root", nroot, "registry root (default: $REGISTRY_ROOT)");
    enroll->add_option("--roll", nroll)->required();
    enroll->add_option("--template", ntemplate)->required();
    enroll->add_option("--now", nnow, "timestamp, e.g. 2024-01-15T09:02:11Z (default: current time)");
    enroll->callback([&] {
        fpr::Registry reg(default_registry_root(nroot));
        reg.enroll(nroll, fpr::read_template(ntemplate), now_or_parse(nnow));
        std::cout << "enrolled=" << nroll << "\n";
    });

    // --- identify ---
    auto* identify = app.add_subcommand("identify", "Identify a template against the registry");
    std::string iroot, itemplate;
    double ithreshold = 0.25;
    identify->add_option("--root", iroot);
    identify->add_option("--template", itemplate)->required();
    identify->add_option("--threshold", ithreshold);
    int identify_exit = kExitOk;
    identify->callback([&] {
        fpr::Registry reg(default_registry_root(iroot));
        const auto best = reg.identify(fpr::read_template(itemplate), ithreshold);
        if (best) {
            std::printf("roll=%s score=%.6f\n", best->roll.c_str(), best->score);
        } else {
            std::cout << "no-match\n";
            identify_exit = kExitReject;
        }
    });

    // --- attend ---
    auto* attend = app.add_subcommand("attend", "Mark attendance from a template or PGM image");
    std::string troot, ttemplate, timage, tnow;
    double tthreshold = 0.25;
    attend->add_option("--root", troot);
    attend->add_option("--template", ttemplate);
    attend->add_option("--image", timage);
    attend->add_option("--now", tnow);
    attend->add_option("--threshold", tthreshold);
    int attend_exit = kExitOk;
    attend->callback([&] {
        if (ttemplate.empty() == timage.empty())
            throw fpr::Error("attend needs exactly one of --template or --image");
        fpr::Template query;
        if (!ttemplate.empty()) {
            query = fpr::read_template(ttemplate);
        } else {
            const fpr::GrayImage img = fpr::read_pgm(timage);
            query = fpr::extract_minutiae(fpr::equalize_histogram(img), fpr::segment(img));
        }
        fpr::Registry reg(default_registry_root(troot));
        const auto result = reg.mark_attendance(query, now_or_parse(tnow), tthreshold);
        if (result) {
            std::printf("roll=%s already-marked=%d\n", result->roll.c_str(),
                        result->already_marked ? 1 : 0);
        } else {
            std::cout << "no-match\n";
            attend_exit = kExitReject;
        }
    });

    // --- report ---
    auto* report = app.add_subcommand("report", "Emit the attendance report CSV for a date");
    std::string proot, pdate;
    report->add_option("--root", proot);
    report->add_option("--date", pdate, "YYYY-MM-DD")->required();
    report->callback([&] {
        fpr::Registry reg(default_registry_root(proot));
        std::cout << reg.report(pdate);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::ostringstream usage;
        app.exit(e, usage, usage);
        std::cerr << usage.str();
        return kExitError;
    }
    if (match_cmd->parsed()) return match_exit;
    if (identify->parsed()) return identify_exit;
    if (attend->parsed()) return attend_exit;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const fpr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
