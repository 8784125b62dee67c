#include "fpr/attendance.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace fpr {

std::string format_timestamp(Timestamp t) {
    std::time_t tt = static_cast<std::time_t>(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::string format_date(Timestamp t) { return format_timestamp(t).substr(0, 10); }
std::string format_time(Timestamp t) { return format_timestamp(t).substr(11, 8); }

Timestamp parse_timestamp(const std::string& s) {
    std::tm tm{};
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                    &tm.tm_hour, &tm.tm_min, &tm.tm_sec) != 6)
        throw Error("bad timestamp '" + s + "'");
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    return static_cast<Timestamp>(timegm(&tm));
}

namespace {

// Advisory exclusive lock on <root>/.lock, held for one mutation.
class ScopedLock {
public:
    explicit ScopedLock(const std::string& root) {
        fd_ = ::open((root + "/.lock").c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ < 0) throw IoFailure("cannot open lock file under " + root);
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            throw IoFailure("cannot lock registry at " + root);
        }
    }
    ~ScopedLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    ScopedLock(const ScopedLock&) = delete;
    ScopedLock& operator=(const ScopedLock&) = delete;

private:
    int fd_ = -1;
};

void append_line(const std::string& path, const std::string& line) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoFailure("cannot open " + path + " for append");
    out << line << '\n';
    if (!out) throw IoFailure("append failed for " + path);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

bool valid_roll(const std::string& roll) {
    if (roll.empty()) return false;
    return roll.find(',') == std::string::npos && roll.find('\n') == std::string::npos;
}

} // namespace

Registry::Registry(std::string root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_ + "/templates", ec);
    if (ec) throw IoFailure("cannot create registry at " + root_);
    load();
}

void Registry::load() {
    enrollments_.clear();
    marks_.clear();
    std::ifstream index(root_ + "/index.csv");
    std::string line;
    while (index && std::getline(index, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 3) throw Error("malformed index line '" + line + "'");
        Enrollment e;
        e.roll = fields[0];
        e.enrolled_at = parse_timestamp(fields[1]);
        e.tmpl = read_template(root_ + "/templates/" + e.roll + ".txt");
        enrollments_[e.roll] = std::move(e);
    }
    std::ifstream att(root_ + "/attendance.csv");
    while (att && std::getline(att, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 3) throw Error("malformed attendance line '" + line + "'");
        marks_.push_back({fields[0], fields[1], fields[2]});
    }
}

void Registry::enroll(const std::string& roll, const Template& t, Timestamp now) {
    if (!valid_roll(roll)) throw Error("invalid roll '" + roll + "'");
    if (enrollments_.count(roll)) throw DuplicateRoll(roll);
    if (t.empty()) throw EmptyTemplate("enroll " + roll);

    ScopedLock lock(root_);
    write_template(t, root_ + "/templates/" + roll + ".txt");
    append_line(root_ + "/index.csv",
                roll + "," + format_timestamp(now) + "," + std::to_string(t.size()));
    enrollments_[roll] = Enrollment{roll, t, now};
}

std::optional<IdentifyResult> Registry::identify(const Template& query, double threshold,
                                                 const MatchParams& params) const {
    if (enrollments_.empty()) throw EmptyRegistry(root_);
    std::optional<IdentifyResult> best;
    // std::map iterates rolls in lexicographic order, so the first strictly
    // better score wins and ties keep the smaller roll.
    for (const auto& [roll, e] : enrollments_) {
        const MatchResult r = match(e.tmpl, query, params);
        if (!best || r.score > best->score) best = IdentifyResult{roll, r.score};
    }
    if (!best || best->score < threshold) return std::nullopt;
    return best;
}

std::optional<MarkResult> Registry::mark_attendance(const Template& query, Timestamp now,
                                                    double threshold, const MatchParams& params) {
    const auto id = identify(query, threshold, params);
    if (!id) return std::nullopt;

    const std::string date = format_date(now);
    for (const AttendanceRecord& r : marks_)
        if (r.roll == id->roll && r.date == date)
            return MarkResult{id->roll, id->score, true};

    ScopedLock lock(root_);
    const AttendanceRecord rec{date, id->roll, format_time(now)};
    append_line(root_ + "/attendance.csv", rec.date + "," + rec.roll + "," + rec.time);
    marks_.push_back(rec);
    return MarkResult{id->roll, id->score, false};
}

std::string Registry::report(const std::string& date) const {
    std::string out = "date,roll,status,time\n";
    for (const auto& [roll, e] : enrollments_) {
        const AttendanceRecord* found = nullptr;
        for (const AttendanceRecord& r : marks_)
            if (r.roll == roll && r.date == date) { found = &r; break; }
        out += date + "," + roll + (found ? ",present," + found->time : ",absent,") + "\n";
    }
    return out;
}

} // namespace fpr
