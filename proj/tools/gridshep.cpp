#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gridshep/gridshep.hpp"

// Command-line front end: raster resolution changes driven by the blended
// interpolant, accuracy reports between rasters, and the convergence study.
// All file outputs are byte-deterministic for fixed inputs and flags.

namespace {

gridshep::Raster read_raster(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw gridshep::IoError("cannot open input raster '" + path + "'");
    gridshep::AscReadStats stats;
    gridshep::Raster r;
    try {
        r = gridshep::read_asc(in, &stats);
    } catch (const gridshep::ParseError& e) {
        throw gridshep::Error(path + ": " + e.what());
    }
    if (stats.cropped())
        std::cerr << "warning: " << path << ": cropped an all-nodata border collar ("
                  << stats.cropped_top << " top, " << stats.cropped_bottom << " bottom, "
                  << stats.cropped_left << " left, " << stats.cropped_right << " right)\n";
    return r;
}

void write_raster(const gridshep::Raster& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw gridshep::IoError("cannot open output file '" + path + "'");
    gridshep::write_asc(r, out);
}

std::ofstream open_text_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw gridshep::IoError("cannot open output file '" + path + "'");
    return out;
}

void warn_below_threshold(std::size_t r, std::size_t s, double u) {
    const double thr = gridshep::order_threshold(r, s);
    if (u < thr)
        std::cerr << "warning: u = " << u << " is below the order threshold " << thr
                  << " = (3+r+s)/t; the convergence-order guarantee does not apply\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Raster resampling with blended local polynomial interpolation"};
    app.require_subcommand(1);

    std::string in_path, out_path, ref_path, test_path, csv_path, mask_path;
    std::size_t rdeg = 2, sdeg = 2;
    double u = 4.0;

    auto* resample = app.add_subcommand(
        "resample", "Resample a raster to a new cellsize via the interpolant");
    double cellsize = 0, factor = 0;
    resample->add_option("input", in_path, "input .asc raster")->required();
    resample->add_option("output", out_path, "output .asc raster")->required();
    auto* cell_opt =
        resample->add_option("--cellsize", cellsize, "target cellsize in model units");
    auto* factor_opt = resample->add_option(
        "--factor", factor, "densification factor (target cellsize = source / factor)");
    cell_opt->excludes(factor_opt);
    resample->add_option("--r", rdeg, "local polynomial degree in x")->capture_default_str();
    resample->add_option("--s", sdeg, "local polynomial degree in y")->capture_default_str();
    resample->add_option("--u", u, "weight exponent")->capture_default_str();

    auto* decimate = app.add_subcommand(
        "decimate", "Coarsen a raster by keeping every factor-th node (no averaging)");
    std::size_t dec_factor = 0;
    decimate->add_option("input", in_path, "input .asc raster")->required();
    decimate->add_option("output", out_path, "output .asc raster")->required();
    decimate->add_option("--factor", dec_factor, "subsampling factor (>= 1)")->required();

    auto* vacc = app.add_subcommand(
        "vaccuracy", "Vertical accuracy of a test raster against a reference");
    double threshold = 3.0;
    vacc->add_option("reference", ref_path, "reference .asc raster")->required();
    vacc->add_option("test", test_path, "test .asc raster")->required();
    vacc->add_option("report", csv_path, "output CSV report")->required();
    vacc->add_option("mask", mask_path, "output exceedance-mask .asc raster")->required();
    vacc->add_option("--threshold", threshold, "exceedance threshold in meters")
        ->capture_default_str();

    auto* hacc = app.add_subcommand(
        "haccuracy", "Horizontal discrepancy of a test raster against a reference");
    std::vector<double> levels;
    hacc->add_option("reference", ref_path, "reference .asc raster")->required();
    hacc->add_option("test", test_path, "test .asc raster")->required();
    hacc->add_option("report", csv_path, "output CSV report")->required();
    hacc->add_option("--levels", levels,
                     "contour elevations (default: 10 equispaced between ref min and max)")
        ->delimiter(',');

    auto* conv = app.add_subcommand("convergence", "Empirical convergence-order study");
    std::string function = "franke";
    std::vector<double> sizes{7, 13, 25, 49};
    conv->add_option("table", csv_path, "output CSV table")->required();
    conv->add_option("--function", function, "test function")
        ->check(CLI::IsMember({"franke"}))
        ->capture_default_str();
    conv->add_option("--r", rdeg, "local polynomial degree in x")->capture_default_str();
    conv->add_option("--s", sdeg, "local polynomial degree in y")->capture_default_str();
    conv->add_option("--u", u, "weight exponent")->capture_default_str();
    conv->add_option("--sizes", sizes, "grid sizes m (uniform m x m grids)")
        ->delimiter(',')
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (resample->parsed()) {
            if (cell_opt->count() == 0 && factor_opt->count() == 0)
                throw gridshep::InvalidInput("one of --cellsize or --factor is required");
            const gridshep::Raster src = read_raster(in_path);
            const double target =
                cell_opt->count() ? cellsize : src.cellsize / factor;
            gridshep::ResampleInfo info;
            const gridshep::Raster out = gridshep::resample(src, target, rdeg, sdeg, u, &info);
            write_raster(out, out_path);
            warn_below_threshold(rdeg, sdeg, u);
            std::cout << "blocks: " << info.K << " x " << info.L << " (" << info.t
                      << " nodes each)\n"
                      << "l_max: " << gridshep::detail::format_full(info.l_max) << "\n"
                      << "order threshold (3+r+s)/t: "
                      << gridshep::detail::format_full(gridshep::order_threshold(rdeg, sdeg))
                      << " (u = " << gridshep::detail::format_full(u) << ")\n"
                      << "output: " << out.ncols << " x " << out.nrows << " cells at "
                      << gridshep::detail::format_full(out.cellsize) << " units\n";
        } else if (decimate->parsed()) {
            const gridshep::Raster src = read_raster(in_path);
            const gridshep::Raster out = gridshep::decimate(src, dec_factor);
            write_raster(out, out_path);
            std::cout << "output: " << out.ncols << " x " << out.nrows << " cells at "
                      << gridshep::detail::format_full(out.cellsize) << " units\n";
        } else if (vacc->parsed()) {
            const gridshep::Raster ref = read_raster(ref_path);
            const gridshep::Raster test = read_raster(test_path);
            const gridshep::VerticalReport rep =
                gridshep::vertical_accuracy(ref, test, threshold);
            auto csv = open_text_output(csv_path);
            gridshep::write_vertical_csv(rep, csv);
            write_raster(gridshep::exceed_mask_raster(ref, rep), mask_path);
            std::cout << gridshep::vertical_summary(rep);
        } else if (hacc->parsed()) {
            const gridshep::Raster ref = read_raster(ref_path);
            const gridshep::Raster test = read_raster(test_path);
            if (levels.empty())
                levels = gridshep::default_levels(ref);
            const gridshep::HorizontalReport rep =
                gridshep::horizontal_discrepancy(ref, test, levels);
            auto csv = open_text_output(csv_path);
            gridshep::write_horizontal_csv(rep, csv);
            std::cout << gridshep::horizontal_summary(rep);
        } else if (conv->parsed()) {
            const std::vector<gridshep::ConvergenceRow> rows =
                gridshep::run_convergence(gridshep::franke, rdeg, sdeg, u, sizes);
            auto csv = open_text_output(csv_path);
            gridshep::write_convergence_csv(rows, csv);
            for (const gridshep::ConvergenceRow& row : rows) {
                std::cout << row.m << " x " << row.n
                          << "  max_err = " << gridshep::detail::format_full(row.max_err);
                if (row.observed_order)
                    std::cout << "  order = "
                              << gridshep::detail::format_fixed3(*row.observed_order);
                std::cout << "\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
