package com.acme.core;

import com.acme.util.Logger;

public class Engine {
    private final Logger log = Logger.get("engine");
    private final Config config;
    private boolean started;

    public Engine(Config config) {
        this.config = config;
    }

    public boolean ready() {
        return config != null && !started;
    }

    public static void start(String profile) {
        Logger.get("engine").info(profile);
    }
}
