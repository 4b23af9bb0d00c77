#ifndef GREENBENCH_ERRORS_HPP
#define GREENBENCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace greenbench {

// Stable numeric codes, mirrored by the GB_ERR_* defines in greenbench.h.
enum class Errc : int {
    ok = 0,
    io = 1,
    parse = 2,
    validation = 3,
    zero_throughput = 4,
    nonpositive_power = 5,
    reduced_exceeds_full = 6,
    state_order_violation = 7,
    unknown_interface_class = 8,
    missing_packet_size = 9,
    packet_size_unknown = 10,
    unknown_state = 11,
    no_passing_rate = 12,
    warmup_timeout = 13,
    unexpected_loss = 14,
    invalid_measurement_set = 15,
    metric_absent = 16,
    bad_argument = 17,
    internal = 18,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace greenbench

#endif
