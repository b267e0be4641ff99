#include "deshadow/manifest.hpp"

#include <json.hpp>

#include <fstream>

#include "deshadow/errors.hpp"
#include "deshadow/version.hpp"

namespace deshadow {

using nlohmann::json;

void RunManifest::write(const std::filesystem::path& dir) const {
    json j;
    j["command"] = command;
    j["code_version"] = code_version.empty() ? kCodeVersion : code_version;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["threads"] = threads;
    j["backbone"] = {{"mode", backbone_mode},
                     {"checksum", backbone_checksum},
                     {"taps", backbone_taps}};
    json ledger = json::array();
    for (const PhaseRecord& p : phase_ledger)
        ledger.push_back({{"index", p.index},
                          {"cycle", p.cycle},
                          {"kind", p.kind},
                          {"epochs", p.epochs},
                          {"mean_loss", p.mean_loss}});
    j["phase_ledger"] = ledger;
    j["outputs"] = outputs;
    j["notes"] = notes;

    std::filesystem::create_directories(dir);
    const auto path = dir / kFileName;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest: " + path.string());
    out << j.dump(2) << "\n";
}

RunManifest RunManifest::read(const std::filesystem::path& dir) {
    const auto path = std::filesystem::is_directory(dir) ? dir / kFileName : dir;
    std::ifstream in(path);
    if (!in) throw IoError("cannot read manifest: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw FormatError("malformed manifest " + path.string() + ": " + e.what());
    }
    RunManifest m;
    m.command = j.value("command", "");
    m.code_version = j.value("code_version", "");
    m.config_hash = j.value("config_hash", "");
    m.seed = j.value("seed", std::uint64_t{0});
    m.threads = j.value("threads", 0);
    if (j.contains("backbone")) {
        m.backbone_mode = j["backbone"].value("mode", "");
        m.backbone_checksum = j["backbone"].value("checksum", "");
        m.backbone_taps = j["backbone"].value("taps", std::vector<int>{});
    }
    for (const auto& p : j.value("phase_ledger", json::array())) {
        PhaseRecord rec;
        rec.index = p.value("index", 0);
        rec.cycle = p.value("cycle", -1);
        rec.kind = p.value("kind", "");
        rec.epochs = p.value("epochs", 0);
        rec.mean_loss = p.value("mean_loss", 0.0);
        m.phase_ledger.push_back(rec);
    }
    m.outputs = j.value("outputs", std::vector<std::string>{});
    m.notes = j.value("notes", std::map<std::string, std::string>{});
    return m;
}

}  // namespace deshadow
