#include "arbo.h"

#include <algorithm>
#include <fstream>
#include <memory>
#include <string>

#include "arbo/errors.hpp"
#include "arbo/io.hpp"
#include "arbo/runner.hpp"

struct arbo_request {
    arbo::Request req;
};

struct arbo_result {
    arbo::Request req;  // resolved
    arbo::RunOutput out;
};

namespace {

thread_local std::string last_error;

arbo_status fail(arbo_status code, const std::string& msg) {
    last_error = msg;
    return code;
}

template <class Fn>
arbo_status guarded(Fn fn) {
    try {
        fn();
        last_error.clear();
        return ARBO_OK;
    } catch (const arbo::ValidationError& e) {
        return fail(ARBO_ERR_VALIDATION, e.what());
    } catch (const arbo::NumericalError& e) {
        return fail(ARBO_ERR_NUMERICAL, e.what());
    } catch (const arbo::IoError& e) {
        return fail(ARBO_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(ARBO_ERR_INTERNAL, e.what());
    }
}

}  // namespace

extern "C" {

const char* arbo_version(void) { return arbo::kToolVersion; }

const char* arbo_last_error(void) { return last_error.c_str(); }

arbo_status arbo_request_create(const char* command, arbo_request** out) {
    if (!command || !out) return fail(ARBO_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto r = std::make_unique<arbo_request>();
        r->req.command = command;
        const auto& names = arbo::command_names();
        if (std::find(names.begin(), names.end(), r->req.command) == names.end())
            throw arbo::ValidationError("command", std::string("unknown command '") + command + "'");
        for (const auto& s : arbo::param_specs()) r->req.defaulted.emplace_back(s.key);
        *out = r.release();
    });
}

void arbo_request_destroy(arbo_request* req) { delete req; }

arbo_status arbo_request_load_config(arbo_request* req, const char* path) {
    if (!req || !path) return fail(ARBO_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto cfg = arbo::parse_config_file(path);
        req->req.params = cfg.params;
        req->req.variant = cfg.variant;
        req->req.schedule = cfg.schedule;
        req->req.defaulted = cfg.defaulted;
    });
}

arbo_status arbo_request_load_schedule(arbo_request* req, const char* path) {
    if (!req || !path) return fail(ARBO_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const auto cfg = arbo::parse_config_file(path);
        for (const auto& e : cfg.schedule.entries) req->req.schedule.entries.push_back(e);
    });
}

arbo_status arbo_request_preset(arbo_request* req, const char* name) {
    if (!req || !name) return fail(ARBO_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const std::string n = name;
        if (n == "baseline") req->req.params = arbo::baseline();
        else if (n == "backward-figure") req->req.params = arbo::backward_figure();
        else if (n == "forward-figure") req->req.params = arbo::forward_figure();
        else if (n == "no-vaccination-illustration") req->req.params = arbo::no_vaccination_illustration();
        else if (n == "no-vaccination-reconstructed") req->req.params = arbo::no_vaccination_reconstructed();
        else throw arbo::ValidationError("preset", "unknown preset '" + n + "'");
        req->req.defaulted.clear();
    });
}

arbo_status arbo_request_set_param(arbo_request* req, const char* key, double value) {
    if (!req || !key) return fail(ARBO_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        arbo::ModelParams p = req->req.params;
        arbo::set_param(p, key, value);
        arbo::validate(p);
        req->req.params = p;
        auto& d = req->req.defaulted;
        d.erase(std::remove(d.begin(), d.end(), std::string(key)), d.end());
    });
}

arbo_status arbo_request_get_param(const arbo_request* req, const char* key, double* value) {
    if (!req || !key || !value) return fail(ARBO_ERR_ARGUMENT, "null argument");
    return guarded([&] { *value = arbo::get_param(req->req.params, key); });
}

arbo_status arbo_request_set_variant(arbo_request* req, const char* variant) {
    if (!req || !variant) return fail(ARBO_ERR_ARGUMENT, "null argument");
    return guarded([&] { req->req.variant = arbo::parse_variant(variant); });
}

arbo_status arbo_request_add_pulse(arbo_request* req, const char* control, double level, double period,
                                   double duration, double start, double end) {
    if (!req || !control) return fail(ARBO_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        req->req.schedule.entries.push_back({arbo::parse_control(control), level, period, duration, start, end});
    });
}

arbo_status arbo_request_set_flag(arbo_request* req, const char* name, const char* value) {
    if (!req || !name || !value) return fail(ARBO_ERR_ARGUMENT, "null argument");
    return guarded([&] { req->req.set_flag(name, value); });
}

arbo_status arbo_request_load_ranges(arbo_request* req, const char* path) {
    if (!req || !path) return fail(ARBO_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        std::ifstream f(path);
        if (!f) throw arbo::IoError(std::string("cannot open ranges file '") + path + "'");
        req->req.ranges = arbo::parse_ranges(f, req->req.params, path);
    });
}

arbo_status arbo_run(const arbo_request* req, arbo_result** out) {
    if (!req || !out) return fail(ARBO_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto r = std::make_unique<arbo_result>();
        r->req = arbo::resolve(req->req);
        r->out = arbo::execute(r->req);
        *out = r.release();
    });
}

arbo_status arbo_replay(const char* manifest_path, arbo_result** out, int* identical) {
    if (!manifest_path || !out || !identical) return fail(ARBO_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto rep = arbo::replay(manifest_path);
        auto r = std::make_unique<arbo_result>();
        r->req = rep.request;
        r->out = rep.output;
        r->out.failures = static_cast<int>(rep.mismatched.size());
        for (const auto& name : rep.mismatched) r->out.summary += "digest mismatch: " + name + "\n";
        *identical = rep.identical ? 1 : 0;
        *out = r.release();
    });
}

void arbo_result_destroy(arbo_result* res) { delete res; }

size_t arbo_result_file_count(const arbo_result* res) { return res ? res->out.files.size() : 0; }

const char* arbo_result_file_name(const arbo_result* res, size_t i) {
    return res && i < res->out.files.size() ? res->out.files[i].name.c_str() : nullptr;
}

const char* arbo_result_file_content(const arbo_result* res, size_t i) {
    return res && i < res->out.files.size() ? res->out.files[i].content.c_str() : nullptr;
}

const char* arbo_result_summary(const arbo_result* res) { return res ? res->out.summary.c_str() : ""; }

int arbo_result_failures(const arbo_result* res) { return res ? res->out.failures : 0; }

arbo_status arbo_result_write(const arbo_result* res, const char* dir) {
    if (!res || !dir) return fail(ARBO_ERR_ARGUMENT, "null argument");
    return guarded([&] { arbo::write_outputs(dir, res->req, res->out); });
}

}  // extern "C"
