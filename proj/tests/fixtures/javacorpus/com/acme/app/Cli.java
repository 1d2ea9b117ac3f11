package com.acme.app;

import com.acme.core.Pipeline;

public class Cli {
    private final Pipeline pipeline = new Pipeline();

    public int dispatch(String[] args) {
        if (args.length == 0) {
            Main.main(args);
            return 0;
        }
        return pipeline.execute(args[0]) ? 0 : 1;
    }
}
