#include "agile/timeutil.hpp"

#include <array>
#include <cctype>
#include <cstdio>

#include "agile/errors.hpp"

namespace agile {

namespace {

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += (m <= 2);
}

bool read_digits(std::string_view s, std::size_t& i, int count, int& out) {
    out = 0;
    for (int k = 0; k < count; ++k) {
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        out = out * 10 + (s[i] - '0');
        ++i;
    }
    return true;
}

[[noreturn]] void bad(std::string_view text) {
    throw ParseError("invalid ISO-8601 timestamp: '" + std::string(text) + "'");
}

}  // namespace

UtcSeconds parse_iso8601(std::string_view text) {
    std::size_t i = 0;
    int year, month, day, hour, minute, second;
    if (!read_digits(text, i, 4, year)) bad(text);
    if (i >= text.size() || text[i] != '-') bad(text);
    ++i;
    if (!read_digits(text, i, 2, month)) bad(text);
    if (i >= text.size() || text[i] != '-') bad(text);
    ++i;
    if (!read_digits(text, i, 2, day)) bad(text);
    if (i >= text.size() || (text[i] != 'T' && text[i] != 't' && text[i] != ' ')) bad(text);
    ++i;
    if (!read_digits(text, i, 2, hour)) bad(text);
    if (i >= text.size() || text[i] != ':') bad(text);
    ++i;
    if (!read_digits(text, i, 2, minute)) bad(text);
    if (i >= text.size() || text[i] != ':') bad(text);
    ++i;
    if (!read_digits(text, i, 2, second)) bad(text);

    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60) bad(text);

    // Fractional seconds: accepted, truncated.
    if (i < text.size() && (text[i] == '.' || text[i] == ',')) {
        ++i;
        if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) bad(text);
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    }

    if (i >= text.size()) bad(text);  // zone designator is mandatory

    std::int64_t offset = 0;
    if (text[i] == 'Z' || text[i] == 'z') {
        ++i;
    } else if (text[i] == '+' || text[i] == '-') {
        const int sign = text[i] == '+' ? 1 : -1;
        ++i;
        int oh = 0, om = 0;
        if (!read_digits(text, i, 2, oh)) bad(text);
        if (i < text.size() && text[i] == ':') ++i;
        if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            if (!read_digits(text, i, 2, om)) bad(text);
        }
        if (oh > 23 || om > 59) bad(text);
        offset = sign * (oh * 3600LL + om * 60LL);
    } else {
        bad(text);
    }
    if (i != text.size()) bad(text);

    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
    return days * kSecondsPerDay + hour * 3600LL + minute * 60LL + second - offset;
}

std::string format_iso8601_utc(UtcSeconds t) {
    std::int64_t days = t / kSecondsPerDay;
    std::int64_t rem = t % kSecondsPerDay;
    if (rem < 0) {
        rem += kSecondsPerDay;
        --days;
    }
    std::int64_t year;
    unsigned month, day;
    civil_from_days(days, year, month, day);
    const int hour = static_cast<int>(rem / 3600);
    const int minute = static_cast<int>((rem / 60) % 60);
    const int second = static_cast<int>(rem % 60);
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%04lld-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<long long>(year), month, day, hour, minute, second);
    return std::string(buf.data());
}

}  // namespace agile
