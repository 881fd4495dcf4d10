#pragma once

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace udcp {

// Streaming JSON writer. Key order is insertion order, reals are printed
// with 17 significant digits so every double round-trips exactly, and the
// output is deterministic byte for byte. Non-finite reals become null.
class JsonWriter {
public:
    explicit JsonWriter(bool pretty = false) : pretty_(pretty) {}

    JsonWriter& begin_object() { return open('{'); }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() { return open('['); }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(std::string_view k) {
        comma();
        quote(k);
        out_ += pretty_ ? ": " : ":";
        pending_value_ = true;
        return *this;
    }

    JsonWriter& value(double v) {
        comma();
        char buf[40];
        if (v != v || v > 1.7976931348623157e308 || v < -1.7976931348623157e308) {
            out_ += "null";
        } else {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out_ += buf;
        }
        return *this;
    }
    JsonWriter& value(std::int64_t v) {
        comma();
        char buf[24];
        std::snprintf(buf, sizeof buf, "%" PRId64, v);
        out_ += buf;
        return *this;
    }
    JsonWriter& value(std::uint64_t v) {
        comma();
        char buf[24];
        std::snprintf(buf, sizeof buf, "%" PRIu64, v);
        out_ += buf;
        return *this;
    }
    JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
    JsonWriter& value(bool v) {
        comma();
        out_ += v ? "true" : "false";
        return *this;
    }
    JsonWriter& value(std::string_view v) {
        comma();
        quote(v);
        return *this;
    }
    JsonWriter& value(const char* v) { return value(std::string_view(v)); }
    JsonWriter& null() {
        comma();
        out_ += "null";
        return *this;
    }

    template <class T>
    JsonWriter& kv(std::string_view k, T v) {
        key(k);
        return value(v);
    }

    const std::string& str() const { return out_; }
    std::string take() { return std::move(out_); }

private:
    void comma() {
        if (pending_value_) {
            pending_value_ = false;
            return;
        }
        if (!stack_.empty() && stack_.back().count++ > 0) out_ += ',';
        newline_indent();
    }

    void newline_indent() {
        if (pretty_ && !stack_.empty()) {
            out_ += '\n';
            out_.append(stack_.size() * 2, ' ');
        }
    }

    JsonWriter& open(char c) {
        comma();
        out_ += c;
        stack_.push_back({0});
        return *this;
    }

    JsonWriter& close(char c) {
        bool had = stack_.back().count > 0;
        stack_.pop_back();
        if (pretty_ && had) {
            out_ += '\n';
            out_.append(stack_.size() * 2, ' ');
        }
        out_ += c;
        return *this;
    }

    void quote(std::string_view s) {
        out_ += '"';
        for (char c : s) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                case '\r': out_ += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        out_ += buf;
                    } else {
                        out_ += c;
                    }
            }
        }
        out_ += '"';
    }

    struct Frame {
        int count;
    };
    bool pretty_;
    bool pending_value_ = false;
    std::string out_;
    std::vector<Frame> stack_;
};

}  // namespace udcp
