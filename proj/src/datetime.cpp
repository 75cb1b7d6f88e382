#include "cvl/datetime.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace cvl {

// Howard Hinnant's civil-days algorithm; exact over the full i32 day range.
int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& year, unsigned& month, unsigned& day) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t y = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = doy - (153 * mp + 2) / 5 + 1;
    month = mp + (mp < 10 ? 3 : -9);
    year = static_cast<int>(y + (month <= 2));
}

namespace {

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

unsigned days_in_month(int y, unsigned m) {
    static constexpr std::array<unsigned, 12> k = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return k[m - 1];
}

bool parse_fixed_uint(std::string_view s, size_t pos, size_t len, int& out) {
    int v = 0;
    for (size_t i = pos; i < pos + len; ++i) {
        const char c = s[i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

bool parse_date_part(std::string_view s, int& y, int& mo, int& d) {
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return false;
    if (!parse_fixed_uint(s, 0, 4, y) || !parse_fixed_uint(s, 5, 2, mo) ||
        !parse_fixed_uint(s, 8, 2, d))
        return false;
    if (mo < 1 || mo > 12) return false;
    if (d < 1 || d > static_cast<int>(days_in_month(y, static_cast<unsigned>(mo)))) return false;
    return true;
}

} // namespace

std::optional<Timestamp> Timestamp::parse(std::string_view s) {
    if (s.size() != 19 || s[10] != ' ' || s[13] != ':' || s[16] != ':') return std::nullopt;
    int y, mo, d, h, mi, sec;
    if (!parse_date_part(s, y, mo, d)) return std::nullopt;
    if (!parse_fixed_uint(s, 11, 2, h) || !parse_fixed_uint(s, 14, 2, mi) ||
        !parse_fixed_uint(s, 17, 2, sec))
        return std::nullopt;
    if (h > 23 || mi > 59 || sec > 59) return std::nullopt;
    const int64_t days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
    return Timestamp{days * 86400 + h * 3600 + mi * 60 + sec};
}

std::optional<int32_t> Timestamp::parse_day(std::string_view s) {
    if (s.size() != 10) return std::nullopt;
    int y, mo, d;
    if (!parse_date_part(s, y, mo, d)) return std::nullopt;
    return static_cast<int32_t>(
        days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)));
}

std::string Timestamp::to_string() const {
    const int32_t dn = day_number();
    int y;
    unsigned mo, d;
    civil_from_days(dn, y, mo, d);
    const int s = second_of_day();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u %02d:%02d:%02d", y, mo, d, s / 3600,
                  (s / 60) % 60, s % 60);
    return buf;
}

int32_t Timestamp::day_number() const {
    int64_t d = epoch_sec / 86400;
    if (epoch_sec % 86400 < 0) --d;
    return static_cast<int32_t>(d);
}

int Timestamp::second_of_day() const {
    return static_cast<int>(epoch_sec - static_cast<int64_t>(day_number()) * 86400);
}

int Timestamp::minute_of_day() const { return second_of_day() / 60; }

std::string day_to_string(int32_t day_number) {
    int y;
    unsigned mo, d;
    civil_from_days(day_number, y, mo, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, mo, d);
    return buf;
}

} // namespace cvl
