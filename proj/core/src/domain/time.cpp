#include "glucoscope/domain/time.hpp"

#include <charconv>
#include <cstdio>

#include "glucoscope/domain/error.hpp"

namespace glucoscope {
namespace {

using namespace std::chrono;

int read_digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) {
    throw Error(ErrorCode::ParseError, "truncated time '" + std::string(text) + "'");
  }
  int value = 0;
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + count, value);
  if (ec != std::errc{} || ptr != first + count) {
    throw Error(ErrorCode::ParseError, "bad digits in '" + std::string(text) + "'");
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw Error(ErrorCode::ParseError,
                "expected '" + std::string(1, c) + "' in '" + std::string(text) + "'");
  }
}

Date make_date(int y, int m, int d, std::string_view text) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    throw Error(ErrorCode::ParseError, "invalid date '" + std::string(text) + "'");
  }
  return sys_days{ymd};
}

}  // namespace

std::string format_date(Date d) {
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Date parse_date(std::string_view text) {
  if (text.size() != 10) {
    throw Error(ErrorCode::ParseError, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  const int y = read_digits(text, 0, 4);
  expect(text, 4, '-');
  const int m = read_digits(text, 5, 2);
  expect(text, 7, '-');
  const int d = read_digits(text, 8, 2);
  return make_date(y, m, d, text);
}

std::string format_timestamp(Timestamp t) {
  const Date d = day_of(t);
  const hh_mm_ss hms{t - d};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(d).c_str(),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  if (text.size() < 20) {
    throw Error(ErrorCode::ParseError, "timestamp too short '" + std::string(text) + "'");
  }
  const Date d = parse_date(text.substr(0, 10));
  if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') {
    throw Error(ErrorCode::ParseError, "expected 'T' in '" + std::string(text) + "'");
  }
  const int hh = read_digits(text, 11, 2);
  expect(text, 13, ':');
  const int mm = read_digits(text, 14, 2);
  expect(text, 16, ':');
  const int ss = read_digits(text, 17, 2);
  if (hh > 23 || mm > 59 || ss > 60) {
    throw Error(ErrorCode::ParseError, "time out of range '" + std::string(text) + "'");
  }
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  }
  seconds offset{0};
  if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    const int sign = text[pos] == '+' ? 1 : -1;
    const int oh = read_digits(text, pos + 1, 2);
    expect(text, pos + 3, ':');
    const int om = read_digits(text, pos + 4, 2);
    offset = seconds{sign * (oh * 3600 + om * 60)};
    pos += 6;
  } else {
    throw Error(ErrorCode::ParseError, "missing UTC offset in '" + std::string(text) + "'");
  }
  if (pos != text.size()) {
    throw Error(ErrorCode::ParseError, "trailing characters in '" + std::string(text) + "'");
  }
  return Timestamp{d} + hours{hh} + minutes{mm} + seconds{ss} - offset;
}

Timestamp now_utc() { return floor<seconds>(system_clock::now()); }

}  // namespace glucoscope
