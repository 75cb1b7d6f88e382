#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cvl {

// Days between 1970-01-01 and y-m-d in the proleptic Gregorian calendar.
int64_t days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(int64_t days, int& year, unsigned& month, unsigned& day);

// Naive local date-time at second resolution. No timezone, taken verbatim
// from the source text.
struct Timestamp {
    int64_t epoch_sec = 0;

    // Exact "YYYY-MM-DD HH:MM:SS" only; anything else is nullopt.
    static std::optional<Timestamp> parse(std::string_view text);
    static std::optional<int32_t> parse_day(std::string_view text); // "YYYY-MM-DD"

    std::string to_string() const;

    int32_t day_number() const; // days since 1970-01-01 (floored)
    int second_of_day() const;  // [0, 86400)
    int minute_of_day() const;  // [0, 1440)

    auto operator<=>(const Timestamp&) const = default;
};

std::string day_to_string(int32_t day_number);

} // namespace cvl
