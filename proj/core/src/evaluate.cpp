#include "deshadow/evaluate.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "deshadow/geometry.hpp"
#include "deshadow/image_io.hpp"

namespace deshadow {

using nlohmann::json;

double intralayer_contrast(const Image& img, const std::vector<RegionOfInterest>& rois_clear,
                           const std::vector<RegionOfInterest>& rois_shadowed) {
    if (rois_clear.empty() || rois_shadowed.empty())
        throw ValidationError("intralayer contrast needs clear and shadowed windows");
    const LayerLabel layer = rois_clear.front().layer;
    const auto pooled_mean = [&](const std::vector<RegionOfInterest>& rois, bool shadowed) {
        double sum = 0.0;
        std::int64_t count = 0;
        for (const RegionOfInterest& roi : rois) {
            if (roi.layer != layer)
                throw ValidationError("intralayer contrast windows mix layers");
            if (roi.shadowed != shadowed)
                throw ValidationError("intralayer contrast windows carry the wrong shadow flag");
            validate_roi(roi, img.rows, img.cols);
            for (int r = roi.row; r < roi.row + roi.size; ++r)
                for (int c = roi.col; c < roi.col + roi.size; ++c) sum += img.at(r, c);
            count += static_cast<std::int64_t>(roi.size) * roi.size;
        }
        return sum / static_cast<double>(count);
    };
    const double i1 = pooled_mean(rois_clear, false);
    const double i2 = pooled_mean(rois_shadowed, true);
    if (i1 + i2 == 0.0)
        throw ValidationError("intralayer contrast undefined: both window means are zero");
    return std::abs((i1 - i2) / (i1 + i2));
}

std::vector<double> lateral_profile(const Image& img, int row_top, int row_bottom,
                                    int col_begin, int col_end) {
    if (row_top < 0 || row_bottom > img.rows || row_top >= row_bottom)
        throw ValidationError("lateral profile row band is empty or out of bounds");
    if (col_begin < 0 || col_end > img.cols || col_begin >= col_end)
        throw ValidationError("lateral profile column range is empty or out of bounds");
    std::vector<double> profile;
    profile.reserve(static_cast<std::size_t>(col_end - col_begin));
    for (int c = col_begin; c < col_end; ++c) {
        double sum = 0.0;
        for (int r = row_top; r < row_bottom; ++r) sum += img.at(r, c);
        profile.push_back(sum / static_cast<double>(row_bottom - row_top));
    }
    return profile;
}

BScan compensate(const BScan& img, const CompensationParams& params,
                 std::vector<int>* flagged_columns) {
    validate(img);
    const int rows = img.height();
    const int cols = img.width();
    BScan out = img;
    const double floor_energy = std::pow(10.0, -params.threshold_exponent);

    for (int c = 0; c < cols; ++c) {
        // Decompressed column energy, accumulated from the bottom so entry r
        // holds the energy from row r downward.
        std::vector<double> cumulative(rows, 0.0);
        double acc = 0.0;
        for (int r = rows - 1; r >= 0; --r) {
            acc += std::pow(img.pixels.at(r, c), params.decompression_exponent);
            cumulative[r] = acc;
        }
        if (acc <= 0.0) {
            if (flagged_columns) flagged_columns->push_back(c);
            continue;  // zero-energy column left unmodified
        }
        for (int r = 0; r < rows; ++r) {
            const double signal = std::pow(img.pixels.at(r, c), params.decompression_exponent);
            const double denom = std::max(2.0 * cumulative[r], floor_energy);
            double value = std::pow(signal / denom, 1.0 / params.compression_exponent);
            value = std::pow(value, params.contrast_exponent);
            out.pixels.at(r, c) = std::clamp(value, 0.0, 1.0);
        }
    }
    return out;
}

RestorationError restoration_error(const BScan& deshadowed, const BScan& ground_truth,
                                   const ShadowMask& mask, double psnr_cap_db) {
    if (!deshadowed.pixels.same_shape(ground_truth.pixels) ||
        !deshadowed.pixels.same_shape(mask.values))
        throw ValidationError("restoration_error: shapes disagree");
    double abs_sum = 0.0, sq_sum = 0.0;
    std::int64_t count = 0;
    for (std::size_t i = 0; i < mask.values.data.size(); ++i) {
        if (mask.values.data[i] > 0.5) {
            const double d = deshadowed.pixels.data[i] - ground_truth.pixels.data[i];
            abs_sum += std::abs(d);
            sq_sum += d * d;
            ++count;
        }
    }
    if (count == 0) throw ValidationError("restoration_error: empty mask");
    RestorationError err;
    err.mae = abs_sum / static_cast<double>(count);
    const double mse = sq_sum / static_cast<double>(count);
    err.psnr_db = mse <= 0.0 ? psnr_cap_db : std::min(psnr_cap_db, 10.0 * std::log10(1.0 / mse));
    return err;
}

std::map<std::string, std::vector<RegionOfInterest>> load_roi_file(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read ROI file: " + path.string());
    std::map<std::string, std::vector<RegionOfInterest>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string stem, layer, shadowed;
        RegionOfInterest roi;
        if (!(fields >> stem >> layer >> shadowed >> roi.row >> roi.col))
            throw FormatError("ROI file line " + std::to_string(lineno) +
                              ": expected 'stem layer shadowed row col [size]'");
        int size = 5;
        if (fields >> size) roi.size = size;
        roi.layer = layer_label_from_string(layer);
        if (shadowed == "0" || shadowed == "clear")
            roi.shadowed = false;
        else if (shadowed == "1" || shadowed == "shadow")
            roi.shadowed = true;
        else
            throw FormatError("ROI file line " + std::to_string(lineno) +
                              ": shadowed flag must be 0/1, got '" + shadowed + "'");
        out[stem].push_back(roi);
    }
    return out;
}

void save_roi_file(const std::filesystem::path& path,
                   const std::map<std::string, std::vector<RegionOfInterest>>& rois) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write ROI file: " + path.string());
    out << "# stem\tlayer\tshadowed\trow\tcol\tsize\n";
    for (const auto& [stem, list] : rois)
        for (const RegionOfInterest& roi : list)
            out << stem << '\t' << to_string(roi.layer) << '\t' << (roi.shadowed ? 1 : 0) << '\t'
                << roi.row << '\t' << roi.col << '\t' << roi.size << '\n';
}

namespace {

Aggregate aggregate_of(const std::vector<double>& values) {
    Aggregate a;
    a.count = static_cast<int>(values.size());
    if (values.empty()) return a;
    double sum = 0.0;
    for (double v : values) sum += v;
    a.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(sq / static_cast<double>(values.size()));
    return a;
}

json aggregate_json(const Aggregate& a) {
    return {{"count", a.count}, {"mean", a.mean}, {"std", a.stddev}};
}

double unmasked_mae(const Image& a, const Image& b, const Image& mask) {
    double sum = 0.0;
    std::int64_t count = 0;
    for (std::size_t i = 0; i < mask.data.size(); ++i) {
        if (mask.data[i] <= 0.5) {
            sum += std::abs(a.data[i] - b.data[i]);
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace

void EvalReport::write(const std::filesystem::path& out_dir) const {
    std::filesystem::create_directories(out_dir);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["counts"] = {{"evaluated", evaluated}, {"skipped", skipped}};
    j["with_compensation"] = with_compensation;
    if (with_compensation)
        j["compensation_exponents"] = {{"contrast", compensation.contrast_exponent},
                                       {"decompression", compensation.decompression_exponent},
                                       {"compression", compensation.compression_exponent},
                                       {"threshold", compensation.threshold_exponent}};
    j["timing"] = {{"mean_infer_ms_per_image", mean_infer_ms_per_image}};

    json images_json = json::array();
    for (const ImageEval& img : images) {
        json e;
        e["stem"] = img.stem;
        e["skipped"] = img.skipped;
        if (img.skipped) {
            e["skip_reason"] = img.skip_reason;
        } else {
            json layers;
            for (const auto& [name, m] : img.layers) {
                json lm = {{"baseline", m.baseline},
                           {"deshadowed", m.deshadowed},
                           {"improvement_pct", m.improvement_pct}};
                if (m.compensated) lm["compensated"] = *m.compensated;
                layers[name] = lm;
            }
            e["intralayer_contrast"] = layers;
            if (img.has_restoration) {
                e["restoration"] = {{"shadowed_mae", img.shadowed_mae},
                                    {"deshadowed_mae", img.deshadowed_mae},
                                    {"mae_improvement_pct", img.mae_improvement_pct},
                                    {"deshadowed_psnr_db", img.deshadowed_psnr_db},
                                    {"unmasked_mae", img.unmasked_mae}};
            }
        }
        images_json.push_back(e);
    }
    j["images"] = images_json;

    json agg;
    for (const auto& [layer, metrics] : aggregate) {
        json lm;
        for (const auto& [name, a] : metrics) lm[name] = aggregate_json(a);
        agg[layer] = lm;
    }
    j["aggregate"] = agg;
    if (mae_improvement) j["restoration_aggregate"]["mae_improvement_pct"] = aggregate_json(*mae_improvement);
    if (unmasked_mae) j["restoration_aggregate"]["unmasked_mae"] = aggregate_json(*unmasked_mae);

    {
        std::ofstream out(out_dir / "report.json");
        if (!out) throw IoError("cannot write report.json in " + out_dir.string());
        out << j.dump(2) << "\n";
    }

    std::ofstream csv(out_dir / "report.csv");
    if (!csv) throw IoError("cannot write report.csv in " + out_dir.string());
    csv << "stem,layer,baseline,deshadowed,compensated,improvement_pct\n";
    csv.precision(10);
    for (const ImageEval& img : images) {
        if (img.skipped) continue;
        for (const auto& [name, m] : img.layers) {
            csv << img.stem << ',' << name << ',' << m.baseline << ',' << m.deshadowed << ',';
            if (m.compensated) csv << *m.compensated;
            csv << ',' << m.improvement_pct << '\n';
        }
    }
}

EvalReport build_report(const std::vector<DatasetEntry>& entries, Remover& remover,
                        const std::map<std::string, std::vector<RegionOfInterest>>& rois,
                        const std::filesystem::path& out_dir, const EvalOptions& options) {
    EvalReport report;
    report.with_compensation = options.with_compensation;
    std::filesystem::create_directories(out_dir);
    const auto profile_dir = out_dir / "profiles";
    if (options.emit_profiles) std::filesystem::create_directories(profile_dir);

    std::map<std::string, std::map<std::string, std::vector<double>>> agg_values;
    std::vector<double> mae_improvements, unmasked_values;
    double total_infer_ms = 0.0;
    std::int64_t infer_images = 0;

    for (std::size_t begin = 0; begin < entries.size();
         begin += static_cast<std::size_t>(options.batch)) {
        const std::size_t end =
            std::min(entries.size(), begin + static_cast<std::size_t>(options.batch));

        // Load originals and run the remover at the network size.
        std::vector<BScan> originals, resized;
        for (std::size_t i = begin; i < end; ++i) {
            BScan scan = load_image(entries[i].image);
            resized.push_back(resize(scan, options.image_size, options.image_size));
            originals.push_back(std::move(scan));
        }
        BatchTimings timings;
        const std::vector<BScan> deshadowed_small = remover.infer_batch(resized, &timings);
        total_infer_ms += timings.total_ms;
        infer_images += timings.images;

        for (std::size_t i = begin; i < end; ++i) {
            const DatasetEntry& entry = entries[i];
            const BScan& baseline = originals[i - begin];
            // Back to native coordinates so ROI rows/cols apply.
            const BScan deshadowed =
                resize(deshadowed_small[i - begin], baseline.height(), baseline.width());

            ImageEval eval;
            eval.stem = entry.stem;

            const auto roi_it = rois.find(entry.stem);
            if (roi_it == rois.end()) {
                eval.skipped = true;
                eval.skip_reason = "no ROI definitions for this image";
                std::cerr << "[evaluate] warning: skipping '" << entry.stem
                          << "': no ROI definitions\n";
                ++report.skipped;
                report.images.push_back(std::move(eval));
                continue;
            }

            std::optional<BScan> compensated;
            if (options.with_compensation)
                compensated = compensate(baseline, report.compensation);

            // Group the image's windows per layer.
            std::map<std::string, std::pair<std::vector<RegionOfInterest>,
                                            std::vector<RegionOfInterest>>> by_layer;
            for (const RegionOfInterest& roi : roi_it->second) {
                auto& bucket = by_layer[to_string(roi.layer)];
                (roi.shadowed ? bucket.second : bucket.first).push_back(roi);
            }
            for (const auto& [layer, buckets] : by_layer) {
                const auto& [clear, shadowed] = buckets;
                if (clear.empty() || shadowed.empty()) continue;
                LayerMetrics m;
                m.baseline = intralayer_contrast(baseline.pixels, clear, shadowed);
                m.deshadowed = intralayer_contrast(deshadowed.pixels, clear, shadowed);
                if (compensated)
                    m.compensated = intralayer_contrast(compensated->pixels, clear, shadowed);
                m.improvement_pct =
                    m.baseline == 0.0 ? 0.0 : (m.baseline - m.deshadowed) / m.baseline * 100.0;
                m.valid = true;
                eval.layers[layer] = m;

                agg_values[layer]["baseline"].push_back(m.baseline);
                agg_values[layer]["deshadowed"].push_back(m.deshadowed);
                if (m.compensated) agg_values[layer]["compensated"].push_back(*m.compensated);
                agg_values[layer]["improvement_pct"].push_back(m.improvement_pct);

                if (options.emit_profiles) {
                    int top = baseline.height(), bottom = 0;
                    for (const RegionOfInterest& roi : roi_it->second)
                        if (to_string(roi.layer) == layer) {
                            top = std::min(top, roi.row);
                            bottom = std::max(bottom, roi.row + roi.size);
                        }
                    const auto base_prof = lateral_profile(baseline.pixels, top, bottom, 0,
                                                           baseline.width());
                    const auto desh_prof = lateral_profile(deshadowed.pixels, top, bottom, 0,
                                                           baseline.width());
                    std::optional<std::vector<double>> comp_prof;
                    if (compensated)
                        comp_prof = lateral_profile(compensated->pixels, top, bottom, 0,
                                                    baseline.width());
                    std::ofstream pf(profile_dir / (entry.stem + "_" + layer + ".csv"));
                    pf << "col,baseline,deshadowed" << (comp_prof ? ",compensated" : "") << "\n";
                    pf.precision(10);
                    for (std::size_t c = 0; c < base_prof.size(); ++c) {
                        pf << c << ',' << base_prof[c] << ',' << desh_prof[c];
                        if (comp_prof) pf << ',' << (*comp_prof)[c];
                        pf << '\n';
                    }
                }
            }

            if (!entry.ground_truth.empty() && !entry.mask.empty()) {
                const BScan truth = load_image(entry.ground_truth);
                const ShadowMask mask = load_mask(entry.mask);
                const RestorationError shadowed_err = restoration_error(baseline, truth, mask);
                const RestorationError deshadowed_err = restoration_error(deshadowed, truth, mask);
                eval.has_restoration = true;
                eval.shadowed_mae = shadowed_err.mae;
                eval.deshadowed_mae = deshadowed_err.mae;
                eval.deshadowed_psnr_db = deshadowed_err.psnr_db;
                eval.mae_improvement_pct =
                    shadowed_err.mae == 0.0
                        ? 0.0
                        : (shadowed_err.mae - deshadowed_err.mae) / shadowed_err.mae * 100.0;
                eval.unmasked_mae = unmasked_mae(deshadowed.pixels, truth.pixels, mask.values);
                mae_improvements.push_back(eval.mae_improvement_pct);
                unmasked_values.push_back(eval.unmasked_mae);
            }

            ++report.evaluated;
            report.images.push_back(std::move(eval));
        }
    }

    for (const auto& [layer, metrics] : agg_values)
        for (const auto& [name, values] : metrics)
            report.aggregate[layer][name] = aggregate_of(values);
    if (!mae_improvements.empty()) report.mae_improvement = aggregate_of(mae_improvements);
    if (!unmasked_values.empty()) report.unmasked_mae = aggregate_of(unmasked_values);
    report.mean_infer_ms_per_image =
        infer_images == 0 ? 0.0 : total_infer_ms / static_cast<double>(infer_images);

    report.write(out_dir);
    return report;
}

}  // namespace deshadow
