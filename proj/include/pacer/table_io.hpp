#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pacer/dp_solver.hpp"

namespace pacer {

// Binary container: magic "PACRDP1", little-endian dimensions, solver
// configuration, fingerprints, cost_to_go as f64, policy as i32, and a
// trailing FNV-1a checksum of all preceding bytes.
std::vector<unsigned char> encode_tables(const ValueTables& t);
// Throws InputError on truncation, bad magic, bad checksum or trailing bytes.
ValueTables decode_tables(const std::vector<unsigned char>& bytes, const std::string& name);

void export_tables(const ValueTables& t, const std::filesystem::path& path);
ValueTables import_tables(const std::filesystem::path& path);
// Also verifies the fingerprints against the given inputs.
ValueTables import_tables(const std::filesystem::path& path, const CourseProfile& course,
                          const RiderModel& m, const PhysicsParams& prm);

}  // namespace pacer
