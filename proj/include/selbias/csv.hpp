#pragma once

// Locale-independent CSV emission for sweep rows.  Numbers are written with
// std::to_chars (general format, 10 significant digits, '.' decimal point)
// so output is byte-identical across runs and locales; non-finite values
// are written as empty fields next to the row's failure flag.

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>
#include <vector>

#include "selbias/sweep.hpp"

namespace selbias {

namespace detail {

inline void append_number(std::string& out, double value) {
    if (!std::isfinite(value)) return;  // blank field, flag column explains
    if (value == 0.0) value = 0.0;      // normalize -0
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, value,
                                   std::chars_format::general, 10);
    out.append(buf, res.ptr);
}

inline void append_int(std::string& out, int value) {
    char buf[16];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    out.append(buf, res.ptr);
}

}  // namespace detail

inline const char* csv_header() {
    return "scenario,level,w,alpha_X,gamma_V,alpha_W,alpha_XW,beta_XV,"
           "log_cor_xr,log_cor_xf,log_or_xr_a1,rr_paper_f1,p_V,p_F,p_A,flag";
}

inline void append_csv_row(std::string& out, const SweepRow& row) {
    out += row.scenario;
    out += ',';
    detail::append_int(out, row.level);
    out += ',';
    detail::append_int(out, row.w);
    for (double v : {row.alpha_x, row.gamma_v, row.alpha_w, row.alpha_xw,
                     row.beta_xv, row.log_cor_xr, row.log_cor_xf,
                     row.log_or_xr_a1, row.rr_paper_f1, row.p_v, row.p_f,
                     row.p_a}) {
        out += ',';
        detail::append_number(out, v);
    }
    out += ',';
    out += row.flag;
    out += '\n';
}

inline std::string to_csv(const std::vector<SweepRow>& rows) {
    std::string out = csv_header();
    out += '\n';
    for (const auto& row : rows) append_csv_row(out, row);
    return out;
}

}  // namespace selbias
