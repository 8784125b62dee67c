#ifndef FPR_ATTENDANCE_HPP
#define FPR_ATTENDANCE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpr/matching.hpp"
#include "fpr/minutiae.hpp"

namespace fpr {

// Unix seconds, UTC.
using Timestamp = std::int64_t;

std::string format_timestamp(Timestamp t); // "2024-01-15T09:02:11Z"
std::string format_date(Timestamp t);      // "2024-01-15"
std::string format_time(Timestamp t);      // "09:02:11"
Timestamp parse_timestamp(const std::string& s);

struct Enrollment {
    std::string roll;
    Template tmpl;
    Timestamp enrolled_at = 0;
};

struct AttendanceRecord {
    std::string date; // "YYYY-MM-DD"
    std::string roll;
    std::string time; // "HH:MM:SS"
};

struct IdentifyResult {
    std::string roll;
    double score = 0.0;
};

struct MarkResult {
    std::string roll;
    double score = 0.0;
    bool already_marked = false;
};

// Flat-file registry rooted at a directory:
//   templates/<roll>.txt   enrolled templates
//   index.csv              roll,enrolled_at,minutiae_count
//   attendance.csv         date,roll,time
// Every mutation is written through to disk under an advisory lock
// (.lock in the root), so reopening the registry reproduces its state.
class Registry {
public:
    explicit Registry(std::string root);

    void enroll(const std::string& roll, const Template& t, Timestamp now);
    std::optional<IdentifyResult> identify(const Template& query, double threshold = 0.25,
                                           const MatchParams& params = {}) const;
    std::optional<MarkResult> mark_attendance(const Template& query, Timestamp now,
                                              double threshold = 0.25,
                                              const MatchParams& params = {});
    std::string report(const std::string& date) const;

    const std::map<std::string, Enrollment>& enrollments() const { return enrollments_; }
    const std::vector<AttendanceRecord>& marks() const { return marks_; }
    const std::string& root() const { return root_; }

private:
    std::string root_;
    std::map<std::string, Enrollment> enrollments_;
    std::vector<AttendanceRecord> marks_;

    void load();
};

} // namespace fpr

#endif
