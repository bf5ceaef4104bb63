#pragma once

#include <stdexcept>
#include <string>

namespace matchkit {

enum class ScanMode { exhaustive, symmetry_reduced, sampled };
enum class Verdict { holds, fails, inconclusive };
enum class Tri { yes, no, inconclusive };

inline std::string to_string(ScanMode m) {
    switch (m) {
        case ScanMode::exhaustive: return "exhaustive";
        case ScanMode::symmetry_reduced: return "symmetry_reduced";
        case ScanMode::sampled: return "sampled";
    }
    return "?";
}

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

inline std::string to_string(Tri t) {
    switch (t) {
        case Tri::yes: return "true";
        case Tri::no: return "false";
        case Tri::inconclusive: return "inconclusive";
    }
    return "?";
}

inline ScanMode scan_mode_from_string(const std::string& s) {
    if (s == "exhaustive") return ScanMode::exhaustive;
    if (s == "symmetry_reduced") return ScanMode::symmetry_reduced;
    if (s == "sampled") return ScanMode::sampled;
    throw std::invalid_argument("unknown scan mode '" + s + "'");
}

}  // namespace matchkit
