#include "fairaudit/report.hpp"

#include <fstream>
#include <system_error>

#include "fairaudit/errors.hpp"

namespace fairaudit {

nlohmann::json AuditRun::to_json() const {
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"command", command},
          {"config", config},
          {"input_fingerprints", input_fingerprints},
          {"outputs", outputs}};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

}  // namespace fairaudit
